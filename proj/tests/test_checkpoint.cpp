#include <cstring>
#include <fstream>
#include <string>

#include "doctest.h"
#include "dwrl/checkpoint.hpp"
#include "dwrl/error.hpp"
#include "dwrl/rng.hpp"
#include "support/tmpdir.hpp"

using namespace dwrl;

namespace {

Tensor awkward_tensor() {
  // Values chosen to stress exact round-tripping: subnormal-ish, negative
  // zero, long fractions.
  Tensor t({2, 3});
  t.data = {0.1, -0.0, 1.0 / 3.0, 1e-300, -123456.789012345678, 2.2250738585072014e-308};
  return t;
}

}  // namespace

TEST_CASE("container save/load round-trips tensors and metadata exactly") {
  dwrl::testing::TempDir dir;
  Container c;
  c.meta["purpose"] = "test";
  c.meta["iteration"] = "17";
  auto t = awkward_tensor();
  c.put("net/w", t);
  c.put("net/b", Tensor::vec({-1.5, 2.5}));
  c.save(dir.file("ckpt.json"));

  auto loaded = Container::load(dir.file("ckpt.json"));
  CHECK(loaded.meta == c.meta);
  REQUIRE(loaded.has("net/w"));
  REQUIRE(loaded.has("net/b"));
  CHECK(loaded.get("net/w").shape == t.shape);
  // Bit-exact doubles.
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(std::memcmp(&loaded.get("net/w").data[i], &t.data[i], sizeof(double)) == 0);
  }
  CHECK(loaded.content_checksum() == c.content_checksum());
}

TEST_CASE("container enumerates tensor names in insertion order") {
  Container c;
  c.put("b", Tensor::vec({1.0}));
  c.put("a", Tensor::vec({2.0}));
  auto names = c.tensor_names();
  REQUIRE(names.size() == 2);
  CHECK(names[0] == "b");
  CHECK(names[1] == "a");
  CHECK_FALSE(c.has("c"));
  CHECK_THROWS_AS(c.get("c"), DomainError);
}

TEST_CASE("params and adam state round-trip through a container") {
  dwrl::testing::TempDir dir;
  RngStream rng(21);
  auto p = make_mlp(4, {8, 8}, 3, Head::kGaussian, rng);
  auto grads = Gradients::zeros_like(p);
  for (auto& [name, t] : grads.named_tensors()) {
    (void)name;
    for (auto& v : t->data) v = rng.uniform(-1.0, 1.0);
  }
  auto adam = AdamState::zeros_like(p);
  adam_step(p, grads, adam, 1e-3);

  Container c;
  c.put_params("policy", p);
  c.put_adam("policy_adam", adam, p);
  c.save(dir.file("net.json"));

  auto loaded = Container::load(dir.file("net.json"));
  auto q = loaded.get_params("policy");
  CHECK(q.head == p.head);
  REQUIRE(q.layers.size() == p.layers.size());
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    CHECK(q.layers[l].w.data == p.layers[l].w.data);
    CHECK(q.layers[l].b.data == p.layers[l].b.data);
  }
  CHECK(q.log_std.data == p.log_std.data);

  auto adam2 = loaded.get_adam("policy_adam", q);
  CHECK(adam2.step == adam.step);
  for (std::size_t l = 0; l < adam.m.size(); ++l) {
    CHECK(adam2.m[l].w.data == adam.m[l].w.data);
    CHECK(adam2.v[l].b.data == adam.v[l].b.data);
  }
  CHECK(adam2.m_log_std.data == adam.m_log_std.data);

  // The round-tripped net behaves identically.
  Tensor input({2, 4});
  for (auto& v : input.data) v = rng.uniform(-1.0, 1.0);
  CHECK(mlp_forward(p, input).data == mlp_forward(q, input).data);
}

TEST_CASE("load rejects a damaged payload with an integrity error") {
  dwrl::testing::TempDir dir;
  Container c;
  c.put("w", Tensor::vec({1.0, 2.0, 3.0}));
  c.save(dir.file("ok.json"));

  std::ifstream in(dir.file("ok.json"));
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  // Flip one stored value without touching the checksum.
  auto pos = text.find("2.0");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 3, "2.5");
  std::ofstream out(dir.file("bad.json"));
  out << text;
  out.close();

  CHECK_THROWS_AS(Container::load(dir.file("bad.json")), IntegrityError);
}

TEST_CASE("load rejects wrong magic and malformed files with parse errors") {
  dwrl::testing::TempDir dir;
  {
    std::ofstream out(dir.file("magic.json"));
    out << R"({"magic":"XXXX1","meta":{},"tensors":[],"checksum":"0"})";
  }
  CHECK_THROWS_AS(Container::load(dir.file("magic.json")), ParseError);
  {
    std::ofstream out(dir.file("garbage.json"));
    out << "not json at all {";
  }
  CHECK_THROWS_AS(Container::load(dir.file("garbage.json")), ParseError);
  CHECK_THROWS_AS(Container::load(dir.file("missing.json")), ParseError);
}

TEST_CASE("checksum covers names, shapes and values") {
  Container a, b;
  a.put("w", Tensor::vec({1.0, 2.0}));
  b.put("w", Tensor::vec({1.0, 2.0}));
  CHECK(a.content_checksum() == b.content_checksum());

  Container renamed;
  renamed.put("w2", Tensor::vec({1.0, 2.0}));
  CHECK(renamed.content_checksum() != a.content_checksum());

  Container reshaped;
  Tensor t({2, 1});
  t.data = {1.0, 2.0};
  reshaped.put("w", t);
  CHECK(reshaped.content_checksum() != a.content_checksum());

  Container valued;
  valued.put("w", Tensor::vec({1.0, 2.000000001}));
  CHECK(valued.content_checksum() != a.content_checksum());

  Container with_meta = a;
  with_meta.meta["k"] = "v";
  CHECK(with_meta.content_checksum() != a.content_checksum());
}
