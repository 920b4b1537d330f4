#include <doctest.h>

#include <sstream>

#include "govlab/core/error.hpp"
#include "govlab/core/rng.hpp"
#include "govlab/ledger.hpp"

using namespace govlab;
using nlohmann::json;

namespace {

  Ledger sample(int n) {
    Ledger l;
    l.append(R"({"type":"genesis"})");
    for (int i = 1; i < n; ++i) {
      l.append(json{{"type", "event"}, {"n", i}, {"amount", "1.000000000"}});
    }
    return l;
  }

}  // namespace

TEST_CASE("sha256 reference values") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("genesis entry") {
  Ledger l;
  CHECK(l.head_hash() == kGenesisPrevHash);
  const auto &g = l.append(R"({"type":"genesis"})");
  CHECK(g.index == 0);
  CHECK(g.prev_hash == std::string(64, '0'));
  // independently computed: sha256("0" + 64 zeros + payload)
  CHECK(g.hash == "bd85ab4eca299889622a23886caa41bdbcb3f4a4ec8eafbce71c339421ecfe6e");
  CHECK(l.verify().ok());
}

TEST_CASE("entry hash preimage") {
  std::string prev;
  for (int i = 0; i < 32; ++i) {
    prev += "ab";
  }
  // sha256("7" + prev + payload), computed independently
  CHECK(entry_hash(7, prev, R"({"a":"1.000000000","b":[1,2]})")
        == "4635d3d805600741652daf03a23accb53393b72fc3f149e3de461606eec62aec");
}

TEST_CASE("identical payloads at different indices hash differently") {
  Ledger l;
  l.append(R"({"x":1})");
  l.append(R"({"x":1})");
  CHECK(l.entries()[0].hash != l.entries()[1].hash);
  CHECK(l.entries()[1].prev_hash == l.entries()[0].hash);
}

TEST_CASE("canonical payloads only") {
  Ledger l;
  CHECK(is_canonical_payload(R"({"a":1,"b":"x"})"));
  CHECK_FALSE(is_canonical_payload(R"({"b":1,"a":2})"));
  CHECK_FALSE(is_canonical_payload(R"({"a": 1})"));
  CHECK_FALSE(is_canonical_payload(R"({"a":1.5})"));
  CHECK_FALSE(is_canonical_payload(R"([1,2])"));
  CHECK_FALSE(is_canonical_payload("not json"));
  CHECK_THROWS_AS(l.append(R"({"b":1,"a":2})"), Error);
  CHECK_THROWS_AS(l.append(json{{"f", 0.5}}), Error);
  CHECK(l.size() == 0);
}

TEST_CASE("tamper detection") {
  auto l = sample(10);
  REQUIRE(l.verify().ok());

  SUBCASE("payload edit") {
    auto e = l.entries();
    e[4].payload = R"({"amount":"2.000000000","n":4,"type":"event"})";
    CHECK(*verify_chain(e).broken_at == 4);
  }
  SUBCASE("payload edit with recomputed hash breaks the next link") {
    auto e = l.entries();
    e[4].payload = R"({"amount":"2.000000000","n":4,"type":"event"})";
    e[4].hash = entry_hash(4, e[4].prev_hash, e[4].payload);
    CHECK(*verify_chain(e).broken_at == 5);
  }
  SUBCASE("reordering") {
    auto e = l.entries();
    std::swap(e[2], e[3]);
    CHECK(*verify_chain(e).broken_at == 2);
  }
  SUBCASE("deleting a middle entry") {
    auto e = l.entries();
    e.erase(e.begin() + 6);
    CHECK(*verify_chain(e).broken_at == 6);
  }
  SUBCASE("truncating the tail is undetectable without an anchor") {
    auto e = l.entries();
    e.resize(7);
    CHECK(verify_chain(e).ok());
    CHECK(Ledger(e).head_hash() != l.head_hash());
  }
  SUBCASE("empty chain is valid") {
    CHECK(verify_chain({}).ok());
  }
}

TEST_CASE("every single-bit flip is detected (property)") {
  auto l = sample(40);
  Xoshiro256ss rng(61);
  for (int trial = 0; trial < 2000; ++trial) {
    auto e = l.entries();
    auto k = rng.next() % e.size();
    int field = static_cast<int>(rng.next() % 3);
    std::string &target = field == 0 ? e[k].payload : field == 1 ? e[k].prev_hash : e[k].hash;
    auto pos = rng.next() % target.size();
    target[pos] = static_cast<char>(target[pos] ^ (1 << (rng.next() % 7)));
    auto status = verify_chain(e);
    REQUIRE_FALSE(status.ok());
    CHECK(*status.broken_at == k);
  }
}

TEST_CASE("JSONL round trip") {
  auto l = sample(25);
  std::stringstream ss;
  write_ledger(ss, l.entries());
  auto text = ss.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 25);
  auto first = text.substr(0, text.find('\n'));
  auto j = json::parse(first);
  CHECK(j.at("index") == 0);
  CHECK(j.at("payload") == R"({"type":"genesis"})");
  CHECK(j.at("prev_hash") == kGenesisPrevHash);

  std::stringstream in(text + "\n");
  auto back = read_ledger(in);
  CHECK(back == l.entries());
  CHECK(entry_from_line(entry_to_line(l.entries()[3])) == l.entries()[3]);
  CHECK_THROWS_AS(entry_from_line("{nope"), Error);
  CHECK_THROWS_AS(entry_from_line(R"({"index":0})"), Error);
}
