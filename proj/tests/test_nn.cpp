#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "ctph/nn/checkpoint.hpp"
#include "ctph/nn/mlp.hpp"
#include "ctph/nn/optim.hpp"

using namespace ctph;

namespace {

using Act = Activation;

// Scalar loss L = sum(C .* Y) over a small batch; returns max relative error
// between analytic and central-finite-difference parameter gradients, also
// checking the input gradient.
double gradcheck(Mlp<double> net, const Eigen::MatrixXd& input,
                 std::mt19937_64& rng) {
  const double h = 1e-5;
  MlpCache<double> cache;
  const Eigen::MatrixXd& y0 = forward(net, input, cache);

  Eigen::MatrixXd upstream(y0.rows(), y0.cols());
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < upstream.rows(); ++i) {
    for (int j = 0; j < upstream.cols(); ++j) upstream(i, j) = u(rng);
  }

  MlpGradients<double> grads;
  Eigen::MatrixXd input_grad;
  backward(net, cache, upstream, grads, &input_grad);

  MlpCache<double> scratch;
  auto loss_at = [&]() {
    return (forward(net, input, scratch).array() * upstream.array()).sum();
  };

  double max_rel = 0.0;
  auto probe = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double up = loss_at();
    param = saved - h;
    const double down = loss_at();
    param = saved;
    const double fd = (up - down) / (2 * h);
    const double rel =
        std::abs(fd - analytic) / std::max(1e-6, std::abs(fd) + std::abs(analytic));
    max_rel = std::max(max_rel, rel);
  };

  for (size_t l = 0; l < net.layers.size(); ++l) {
    auto& layer = net.layers[l];
    for (int i = 0; i < layer.weight.rows(); ++i) {
      for (int j = 0; j < layer.weight.cols(); ++j) {
        probe(layer.weight(i, j), grads.dw[l](i, j));
      }
    }
    for (int i = 0; i < layer.bias.size(); ++i) {
      probe(layer.bias(i), grads.db[l](i));
    }
  }

  // Input gradient against the same oracle.
  Eigen::MatrixXd in = input;
  for (int i = 0; i < in.rows(); ++i) {
    for (int j = 0; j < in.cols(); ++j) {
      const double saved = in(i, j);
      in(i, j) = saved + h;
      const double up =
          (forward(net, in, scratch).array() * upstream.array()).sum();
      in(i, j) = saved - h;
      const double down =
          (forward(net, in, scratch).array() * upstream.array()).sum();
      in(i, j) = saved;
      const double fd = (up - down) / (2 * h);
      const double rel = std::abs(fd - input_grad(i, j)) /
                         std::max(1e-6, std::abs(fd) + std::abs(input_grad(i, j)));
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

}  // namespace

TEST_CASE("forward basics: zero net, identity layer, tanh range") {
  std::mt19937_64 rng(1);

  Mlp<double> zero = Mlp<double>::make({3, 4, 1}, {Act::tanh, Act::tanh}, rng);
  for (auto& l : zero.layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
  CHECK(forward(zero, Eigen::Vector3d{0.3, -2.0, 5.0})(0) == 0.0);

  Mlp<double> ident = Mlp<double>::make({3, 3}, {Act::linear}, rng);
  ident.layers[0].weight.setIdentity();
  ident.layers[0].bias.setZero();
  const Eigen::Vector3d x{1.5, -0.25, 7.0};
  CHECK((forward(ident, typename Mlp<double>::Vector(x)) - x).norm() == 0.0);

  // Actor-shaped net: the tanh head bounds the output for any input.
  Mlp<float> actor =
      Mlp<float>::make({7, 64, 64, 1}, {Act::tanh, Act::tanh, Act::tanh}, rng);
  MlpCache<float> cache;
  std::uniform_real_distribution<float> u(-50.0f, 50.0f);
  Eigen::MatrixXf batch(7, 1000);
  for (int rep = 0; rep < 100; ++rep) {  // 1e5 inputs total
    for (int i = 0; i < batch.size(); ++i) batch.data()[i] = u(rng);
    const auto& y = forward(actor, batch, cache);
    REQUIRE(y.cwiseAbs().maxCoeff() <= 1.0f);
  }

  CHECK_THROWS_AS(
      (void)forward(actor, Eigen::MatrixXf::Zero(6, 1), cache),
      std::invalid_argument);
}

TEST_CASE("backward matches closed forms and finite differences") {
  std::mt19937_64 rng(2);

  SUBCASE("scalar linear net: dL/dw = x") {
    Mlp<double> lin = Mlp<double>::make({1, 1}, {Act::linear}, rng);
    MlpCache<double> cache;
    Eigen::MatrixXd x(1, 1);
    x(0, 0) = 3.7;
    (void)forward(lin, x, cache);
    MlpGradients<double> g;
    Eigen::MatrixXd dx;
    backward(lin, cache, Eigen::MatrixXd::Ones(1, 1), g, &dx);
    CHECK(g.dw[0](0, 0) == doctest::Approx(3.7));
    CHECK(g.db[0](0) == doctest::Approx(1.0));
    CHECK(dx(0, 0) == doctest::Approx(lin.layers[0].weight(0, 0)));
  }

  SUBCASE("constant output has zero input gradient") {
    Mlp<double> zero =
        Mlp<double>::make({4, 8, 1}, {Act::relu, Act::linear}, rng);
    zero.layers[0].weight.setZero();  // output independent of the input
    MlpCache<double> cache;
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 5);
    (void)forward(zero, x, cache);
    MlpGradients<double> g;
    Eigen::MatrixXd dx;
    backward(zero, cache, Eigen::MatrixXd::Ones(1, 5), g, &dx);
    CHECK(dx.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("finite differences across all three production shapes") {
    const Eigen::MatrixXd batch = Eigen::MatrixXd::Random(8, 3);
    Mlp<double> critic = Mlp<double>::make(
        {8, 64, 64, 1}, {Act::relu, Act::relu, Act::linear}, rng);
    CHECK(gradcheck(critic, batch, rng) < 1e-4);

    Mlp<double> actor = Mlp<double>::make(
        {7, 64, 64, 1}, {Act::tanh, Act::tanh, Act::tanh}, rng);
    CHECK(gradcheck(actor, batch.topRows(7), rng) < 1e-4);

    Mlp<double> expert = Mlp<double>::make(
        {7, 128, 128, 1}, {Act::tanh, Act::tanh, Act::tanh}, rng);
    CHECK(gradcheck(expert, batch.topRows(7), rng) < 1e-4);
  }
}

TEST_CASE("Adam descends and skips non-finite gradients") {
  std::mt19937_64 rng(3);

  SUBCASE("zero gradient leaves parameters untouched") {
    Mlp<double> net = Mlp<double>::make({2, 2}, {Act::linear}, rng);
    const Eigen::MatrixXd w0 = net.layers[0].weight;
    Adam<double> opt(net, 0.1);
    MlpGradients<double> g;
    g.match(net);
    g.dw[0].setZero();
    g.db[0].setZero();
    opt.step(net, g);
    CHECK((net.layers[0].weight - w0).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("one step on f(w) = w^2 moves toward the minimum") {
    Mlp<double> net = Mlp<double>::make({1, 1}, {Act::linear}, rng);
    net.layers[0].weight(0, 0) = 1.0;
    Adam<double> opt(net, 0.1);
    MlpGradients<double> g;
    g.match(net);
    g.dw[0](0, 0) = 2.0;  // d(w^2)/dw at w = 1
    g.db[0].setZero();
    opt.step(net, g);
    CHECK(std::abs(net.layers[0].weight(0, 0)) < 1.0);
  }

  SUBCASE("a quadratic bowl is driven to its minimum") {
    Mlp<double> net = Mlp<double>::make({1, 1}, {Act::linear}, rng);
    net.layers[0].weight(0, 0) = 2.0;
    net.layers[0].bias(0) = -1.5;
    Adam<double> opt(net, 0.05);
    MlpGradients<double> g;
    g.match(net);
    auto loss = [&] {
      const double w = net.layers[0].weight(0, 0);
      const double b = net.layers[0].bias(0);
      return w * w + 3 * b * b;
    };
    const double initial = loss();
    for (int i = 0; i < 200; ++i) {
      g.dw[0](0, 0) = 2 * net.layers[0].weight(0, 0);
      g.db[0](0) = 6 * net.layers[0].bias(0);
      opt.step(net, g);
    }
    // Adam's momentum oscillates at a fine scale near the optimum; the
    // meaningful invariant is the orders-of-magnitude contraction.
    CHECK(loss() < 1e-4);
    CHECK(loss() < 1e-4 * initial);
  }

  SUBCASE("non-finite gradients are skipped with a counter") {
    Mlp<double> net = Mlp<double>::make({2, 1}, {Act::linear}, rng);
    const Eigen::MatrixXd w0 = net.layers[0].weight;
    Adam<double> opt(net, 0.1);
    MlpGradients<double> g;
    g.match(net);
    g.dw[0].setConstant(std::numeric_limits<double>::quiet_NaN());
    g.db[0].setZero();
    opt.step(net, g);
    CHECK(opt.skipped() == 1);
    CHECK((net.layers[0].weight - w0).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("soft_update blends parameters by tau") {
  std::mt19937_64 rng(4);
  Mlp<double> online = Mlp<double>::make({2, 2}, {Act::linear}, rng);
  Mlp<double> target = Mlp<double>::make({2, 2}, {Act::linear}, rng);

  Mlp<double> t1 = target;
  soft_update(t1, online, 1.0);
  CHECK((t1.layers[0].weight - online.layers[0].weight).cwiseAbs().maxCoeff() ==
        0.0);

  Mlp<double> t0 = target;
  soft_update(t0, online, 0.0);
  CHECK((t0.layers[0].weight - target.layers[0].weight).cwiseAbs().maxCoeff() ==
        0.0);

  Mlp<double> ones = online, zeros = online;
  ones.layers[0].weight.setOnes();
  zeros.layers[0].weight.setZero();
  soft_update(zeros, ones, 0.005);
  CHECK(zeros.layers[0].weight(0, 0) == doctest::Approx(0.005));

  Mlp<double> other = Mlp<double>::make({3, 2}, {Act::linear}, rng);
  CHECK_THROWS_AS(soft_update(other, online, 0.5), std::invalid_argument);
}

TEST_CASE("LrSchedule holds, decays linearly, then holds the final rate") {
  const LrSchedule sched{5e-4, 1e-4, 100, 67};
  sched.validate();
  CHECK(sched.rate(0) == doctest::Approx(5e-4));
  CHECK(sched.rate(99) == doctest::Approx(5e-4));
  CHECK(sched.rate(100) == doctest::Approx(5e-4));
  // Midway through the decay the rate is halfway.
  CHECK(sched.rate(100 + 34) < 5e-4);
  CHECK(sched.rate(167) == doctest::Approx(1e-4));
  CHECK(sched.rate(400) == doctest::Approx(1e-4));

  LrSchedule bad{1e-4, 5e-4, 100, 67};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("checkpoints round-trip through the binary format") {
  std::mt19937_64 rng(5);
  const auto dir = std::filesystem::temp_directory_path();

  SUBCASE("double round trip is exact") {
    Mlp<double> net = Mlp<double>::make(
        {7, 64, 64, 1}, {Act::tanh, Act::tanh, Act::tanh}, rng);
    const auto path = dir / "ctph_test_ckpt_d.bin";
    save_network(path, net);
    const Mlp<double> back = load_network<double>(path);
    REQUIRE(back.same_architecture(net));
    for (size_t l = 0; l < net.layers.size(); ++l) {
      CHECK((back.layers[l].weight - net.layers[l].weight)
                .cwiseAbs()
                .maxCoeff() == 0.0);
      CHECK((back.layers[l].bias - net.layers[l].bias).cwiseAbs().maxCoeff() ==
            0.0);
    }
    std::filesystem::remove(path);
  }

  SUBCASE("float round trip is exact (float64 payload is a superset)") {
    Mlp<float> net = Mlp<float>::make(
        {8, 64, 64, 1}, {Act::relu, Act::relu, Act::linear}, rng);
    const auto path = dir / "ctph_test_ckpt_f.bin";
    save_network(path, net);
    const Mlp<float> back = load_network<float>(path);
    REQUIRE(back.same_architecture(net));
    for (size_t l = 0; l < net.layers.size(); ++l) {
      CHECK((back.layers[l].weight - net.layers[l].weight)
                .cwiseAbs()
                .maxCoeff() == 0.0f);
    }
    std::filesystem::remove(path);
  }

  SUBCASE("corrupt magic and truncation are rejected") {
    const auto path = dir / "ctph_test_ckpt_bad.bin";
    {
      std::ofstream out(path, std::ios::binary);
      const uint32_t junk = 0xDEADBEEF;
      out.write(reinterpret_cast<const char*>(&junk), sizeof(junk));
    }
    CHECK_THROWS_AS((void)load_network<double>(path), std::runtime_error);

    Mlp<double> net = Mlp<double>::make({2, 2}, {Act::linear}, rng);
    save_network(path, net);
    std::filesystem::resize_file(
        path, std::filesystem::file_size(path) - 8);
    CHECK_THROWS_AS((void)load_network<double>(path), std::runtime_error);
    std::filesystem::remove(path);
  }
}

TEST_CASE("initialization is deterministic under a fixed seed") {
  std::mt19937_64 a(77), b(77);
  Mlp<float> na =
      Mlp<float>::make({7, 64, 64, 1}, {Act::tanh, Act::tanh, Act::tanh}, a);
  Mlp<float> nb =
      Mlp<float>::make({7, 64, 64, 1}, {Act::tanh, Act::tanh, Act::tanh}, b);
  for (size_t l = 0; l < na.layers.size(); ++l) {
    CHECK((na.layers[l].weight - nb.layers[l].weight).cwiseAbs().maxCoeff() ==
          0.0f);
    CHECK((na.layers[l].bias - nb.layers[l].bias).cwiseAbs().maxCoeff() ==
          0.0f);
  }
}
