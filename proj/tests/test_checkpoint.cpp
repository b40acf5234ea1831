#include <string>

#include "doctest.h"
#include "helpers.hpp"

#include "adev/checkpoint.hpp"
#include "adev/errors.hpp"

using namespace adev;

namespace {

Checkpoint roundtrip(const Checkpoint& c) { return decode_checkpoint(encode_checkpoint(c)); }

}  // namespace

TEST_CASE("checkpoint round trips") {
  SUBCASE("regression") {
    RegressionModel r(3, 2, 6, {5, 4});
    Rng rng(1);
    r.net().initialize(rng);
    const auto back = regression_from_checkpoint(roundtrip(to_checkpoint(r)));
    CHECK(back.n() == 3);
    CHECK(back.d() == 2);
    CHECK(back.steps() == 6);
    CHECK(back.net().params() == r.net().params());
  }
  SUBCASE("rank-1 ensemble") {
    const auto ens = sample_map_ensemble(4, 3, 3, 0.5, 2);
    const auto back = map_ensemble_from_checkpoint(roundtrip(to_checkpoint(ens)));
    REQUIRE(back.size() == 3);
    for (std::size_t k = 0; k < ens.size(); ++k) CHECK(back[k].params() == ens[k].params());
  }
  SUBCASE("rank-2 ensemble") {
    for (bool time : {false, true}) {
      const auto ens = sample_map_ensemble2(2, 4, 2, time, 0.5, 3);
      const auto back = map_ensemble2_from_checkpoint(roundtrip(to_checkpoint(ens)));
      REQUIRE(back.size() == 2);
      CHECK(back[0].time_channel == time);
      CHECK(back[1].map.params() == ens[1].map.params());
    }
  }
  SUBCASE("generator") {
    GeneratorShape s;
    s.d = 2;
    s.embed_hidden = {6, 5};
    s.head_hidden = {7};
    GeneratorModel g(s);
    Rng rng(4);
    g.initialize(rng);
    const auto back = generator_from_checkpoint(roundtrip(to_checkpoint(g)));
    CHECK(back.shape().embed_hidden == s.embed_hidden);
    CHECK(back.shape().head_hidden == s.head_hidden);
    CHECK(back.params() == g.params());
  }
}

TEST_CASE("damaged checkpoints are rejected") {
  const std::string good = encode_checkpoint(to_checkpoint(sample_map_ensemble(2, 2, 1, 0.5, 5)));
  CHECK_THROWS_AS(decode_checkpoint("XDEV" + good.substr(4)), ParseError);
  CHECK_THROWS_AS(decode_checkpoint(good.substr(0, good.size() - 3)), ParseError);
  CHECK_THROWS_AS(decode_checkpoint(good + "x"), ParseError);
  std::string v2 = good;
  v2[4] = 2;
  CHECK_THROWS_AS(decode_checkpoint(v2), ParseError);
  std::string kind9 = good;
  kind9[8] = 9;
  CHECK_THROWS_AS(decode_checkpoint(kind9), ParseError);
  CHECK_THROWS_AS(regression_from_checkpoint(decode_checkpoint(good)), ParseError);
}
