#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "aeris/learning.hpp"

using namespace aeris;

namespace {

std::string temp_file(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

Environment strip_env() {
  ScenarioState state;
  state.seed = 1;
  state.area = AreaGrid(120.0, 40.0, 40.0);
  state.uav_altitude_m = 20.0;
  state.battery_capacity_j = 1e6;
  state.battery_reserve_j = 1e3;
  state.ues.push_back({1, {100.0, 20.0, 0.0}, ServiceClass::video});
  state.uavs.push_back({1, {20.0, 20.0, 20.0}, 1e6, 0.0});
  state.ris = {{1, {2000.0, 2000.0, 50.0}, 2, 0.149896229, 1}};
  ChannelParams channel;
  channel.noise_power_w = 4e-8;
  EnvConfig cfg;
  cfg.horizon_slots = 4;
  cfg.d_max_m = 10.0;
  return Environment(state, cfg, channel, EnergyParams{},
                     {PhaseConfig::zeros(2, 1)});
}

MdpTransition transition(std::vector<double> s, int a, double r,
                         std::vector<double> next, bool terminal) {
  return {std::move(s), a, r, std::move(next), terminal};
}

}  // namespace

TEST_CASE("epsilon schedule decays over the first half") {
  TrainConfig cfg;
  cfg.episodes = 100;
  CHECK(epsilon_at(0, cfg) == doctest::Approx(1.0));
  CHECK(epsilon_at(25, cfg) == doctest::Approx(0.525));
  CHECK(epsilon_at(50, cfg) == doctest::Approx(0.05));
  CHECK(epsilon_at(99, cfg) == doctest::Approx(0.05));
}

TEST_CASE("action selection is greedy with ties to the lowest index") {
  Rng rng(1);
  Eigen::VectorXd q(4);
  q << 1.0, 3.0, 3.0, 2.0;
  for (int i = 0; i < 20; ++i) CHECK(select_action(q, 0.0, rng) == 1);

  Eigen::VectorXd flat = Eigen::VectorXd::Zero(9);
  CHECK(select_action(flat, 0.0, rng) == 0);

  // full exploration covers every action
  std::array<int, 9> seen{};
  for (int i = 0; i < 2000; ++i)
    seen[static_cast<std::size_t>(select_action(flat, 1.0, rng))] += 1;
  for (int n : seen) CHECK(n > 100);
}

TEST_CASE("zero-initialised network outputs zero") {
  Mlp net({3, 8, 8, 2});
  Eigen::VectorXd in(3);
  in << 0.3, -0.2, 0.9;
  Eigen::VectorXd out = net.forward(in);
  CHECK(out(0) == doctest::Approx(0.0));
  CHECK(out(1) == doctest::Approx(0.0));
  CHECK(net.parameter_count() == 3 * 8 + 8 + 8 * 8 + 8 + 8 * 2 + 2);
}

TEST_CASE("forward pass applies the rectifier on hidden layers only") {
  Mlp net({1, 2, 1});
  // W0 = [1; -1], b0 = [0.5; 0.5], W1 = [1 1], b1 = [-0.25]
  Eigen::VectorXd flat(net.parameter_count());
  flat << 1.0, -1.0, 0.5, 0.5, 1.0, 1.0, -0.25;
  net.set_flat_params(flat);

  // x = 1: hidden = relu([1.5, -0.5]) = [1.5, 0]; out = 1.25
  Eigen::VectorXd x(1);
  x << 1.0;
  CHECK(net.forward(x)(0) == doctest::Approx(1.25));
  // x = -2: hidden = relu([-1.5, 2.5]) = [0, 2.5]; out = 2.25
  x << -2.0;
  CHECK(net.forward(x)(0) == doctest::Approx(2.25));
  // the linear output may go negative
  x << 0.0;
  CHECK(net.forward(x)(0) == doctest::Approx(0.75));
}

TEST_CASE("he initialisation is bounded and reproducible") {
  Rng a(42), b(42), c(7);
  Mlp na = Mlp::he_init({4, 16, 2}, a);
  Mlp nb = Mlp::he_init({4, 16, 2}, b);
  Mlp nc = Mlp::he_init({4, 16, 2}, c);
  CHECK(na.flat_params().isApprox(nb.flat_params(), 0.0));
  CHECK_FALSE(na.flat_params().isApprox(nc.flat_params(), 0.0));

  double limit0 = std::sqrt(6.0 / 4.0);
  for (int i = 0; i < na.weights()[0].size(); ++i)
    CHECK(std::abs(na.weights()[0].data()[i]) <= limit0);
  // biases start at zero
  CHECK(na.biases()[0].cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("flat parameter round trip") {
  Rng rng(3);
  Mlp net = Mlp::he_init({5, 8, 3}, rng);
  Eigen::VectorXd flat = net.flat_params();
  Mlp copy({5, 8, 3});
  copy.set_flat_params(flat);
  CHECK(copy.flat_params().isApprox(flat, 0.0));
  Eigen::VectorXd wrong(3);
  CHECK_THROWS_AS(copy.set_flat_params(wrong), ContractError);
}

TEST_CASE("analytic gradients match finite differences") {
  Rng rng(11);
  Mlp net = Mlp::he_init({4, 8, 3}, rng);
  Eigen::VectorXd x(4);
  x << 0.2, -0.7, 1.1, 0.4;
  Eigen::VectorXd dout(3);
  dout << 1.0, -0.5, 0.25;

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(net.parameter_count()));
  net.accumulate_gradient(x, dout, grad);

  auto scalar_loss = [&](const Mlp& m) { return dout.dot(m.forward(x)); };
  const double h = 1e-6;
  Eigen::VectorXd flat = net.flat_params();
  for (Eigen::Index i = 0; i < flat.size(); i += 7) {
    Eigen::VectorXd bumped = flat;
    bumped(i) += h;
    Mlp plus({4, 8, 3});
    plus.set_flat_params(bumped);
    bumped(i) = flat(i) - h;
    Mlp minus({4, 8, 3});
    minus.set_flat_params(bumped);
    double fd = (scalar_loss(plus) - scalar_loss(minus)) / (2.0 * h);
    CHECK(grad(i) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("replay memory is a bounded ring with uniform sampling") {
  ReplayMemory mem(3);
  CHECK(mem.capacity() == 3);
  for (int i = 0; i < 5; ++i)
    mem.push(transition({static_cast<double>(i)}, 0, 0.0, {0.0}, false));
  CHECK(mem.size() == 3);
  // oldest entries were overwritten: the ring now holds 2, 3, 4
  std::set<double> held;
  for (std::size_t i = 0; i < mem.size(); ++i)
    held.insert(mem.at(i).state[0]);
  CHECK(held == std::set<double>{2.0, 3.0, 4.0});

  Rng rng(1);
  auto idx = mem.sample_indices(64, rng);
  CHECK(idx.size() == 64);
  for (std::size_t i : idx) CHECK(i < mem.size());
  // with replacement: 64 draws from 3 slots must repeat
  CHECK(std::set<std::size_t>(idx.begin(), idx.end()).size() <= 3);

  Rng rng2(1);
  CHECK(mem.sample_indices(64, rng2) == idx);
}

TEST_CASE("dqn targets use the snapshot net") {
  TrainConfig cfg;
  cfg.variant = LearnerVariant::dqn;
  cfg.gamma = 0.5;

  Mlp live({2, 4, 3});
  Rng rng(5);
  Mlp snapshot = Mlp::he_init({2, 4, 3}, rng);

  auto t = transition({0.5, 0.5}, 1, 1.0, {0.25, 0.75}, false);
  std::vector<const MdpTransition*> batch{&t};

  Eigen::VectorXd s_next(2);
  s_next << 0.25, 0.75;
  double target = 1.0 + 0.5 * snapshot.forward(s_next).maxCoeff();
  // live net is all zeros, so the loss is the squared target
  CHECK(td_loss(live, snapshot, batch, cfg) ==
        doctest::Approx(target * target));

  // terminal transitions drop the bootstrap term
  auto t_end = transition({0.5, 0.5}, 1, 1.0, {0.25, 0.75}, true);
  batch = {&t_end};
  CHECK(td_loss(live, snapshot, batch, cfg) == doctest::Approx(1.0));
}

TEST_CASE("actor-critic loss combines critic error and policy score") {
  TrainConfig cfg;
  cfg.variant = LearnerVariant::actor_critic;
  cfg.gamma = 0.9;

  Mlp live({2, 4, 10});  // 9 action logits + a value head
  Mlp snapshot({2, 4, 10});
  auto t = transition({0.1, 0.2}, 4, 1.0, {0.3, 0.4}, false);
  std::vector<const MdpTransition*> batch{&t};

  // zero nets: V = 0 everywhere, target = advantage = r, uniform policy
  double expected = 1.0 + 1.0 * std::log(9.0);
  CHECK(td_loss(live, snapshot, batch, cfg) == doctest::Approx(expected));
}

TEST_CASE("gradient step moves parameters against the gradient") {
  Mlp net({1, 2, 1});
  Eigen::VectorXd g = Eigen::VectorXd::Ones(
      static_cast<Eigen::Index>(net.parameter_count()));
  sgd_step(net, g, 0.1);
  Eigen::VectorXd flat = net.flat_params();
  for (Eigen::Index i = 0; i < flat.size(); ++i)
    CHECK(flat(i) == doctest::Approx(-0.1));
}

TEST_CASE("training runs deterministically end to end") {
  TrainConfig cfg;
  cfg.episodes = 40;
  cfg.batch_size = 8;
  cfg.seed = 21;

  TrainResult a = train(strip_env(), cfg);
  TrainResult b = train(strip_env(), cfg);
  CHECK(a.net.flat_params().isApprox(b.net.flat_params(), 0.0));
  REQUIRE(a.episodes.size() == 40);
  CHECK(a.episodes.front().epsilon == doctest::Approx(1.0));
  CHECK(a.episodes.back().epsilon == doctest::Approx(0.05));
  for (const auto& e : a.episodes) CHECK(e.steps == 4);

  cfg.seed = 22;
  TrainResult c = train(strip_env(), cfg);
  CHECK_FALSE(a.net.flat_params().isApprox(c.net.flat_params(), 0.0));
}

TEST_CASE("actor-critic training variant runs") {
  TrainConfig cfg;
  cfg.variant = LearnerVariant::actor_critic;
  cfg.episodes = 20;
  cfg.batch_size = 8;
  TrainResult r = train(strip_env(), cfg);
  CHECK(r.net.output_size() == 10);
  CHECK(r.net.layer_dims().front() ==
        Environment::encoding_length(AreaGrid(120.0, 40.0, 40.0)));
}

TEST_CASE("warm start must match the layer sizes") {
  TrainConfig cfg;
  cfg.episodes = 5;
  cfg.batch_size = 4;
  Mlp wrong({3, 4, 9});
  CHECK_THROWS_AS(train(strip_env(), cfg, &wrong), ConfigError);

  TrainResult base = train(strip_env(), cfg);
  CHECK_NOTHROW(train(strip_env(), cfg, &base.net));
}

TEST_CASE("training validates its configuration") {
  TrainConfig cfg;
  cfg.episodes = 0;
  CHECK_THROWS_AS(train(strip_env(), cfg), ConfigError);
  cfg = TrainConfig{};
  cfg.gamma = 1.0;
  CHECK_THROWS_AS(train(strip_env(), cfg), ConfigError);
  cfg = TrainConfig{};
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(train(strip_env(), cfg), ConfigError);
}

TEST_CASE("greedy action reads the action head only") {
  Rng rng(9);
  Mlp net = Mlp::he_init({5, 8, 10}, rng);
  std::vector<double> state{0.1, 0.2, 0.3, 0.4, 0.5};
  Eigen::VectorXd out = net.forward(
      Eigen::Map<const Eigen::VectorXd>(state.data(), 5));
  Eigen::Index best = 0;
  out.head(9).maxCoeff(&best);
  CHECK(greedy_action(net, state) == static_cast<int>(best));
}

TEST_CASE("checkpoint round trip preserves the network exactly") {
  Rng rng(13);
  Mlp net = Mlp::he_init({18, 16, 16, 9}, rng);
  AreaGrid area(120.0, 40.0, 40.0);
  std::string path = temp_file("aeris_test_checkpoint.json");
  save_checkpoint(path, net, LearnerVariant::dqn, area);

  Checkpoint cp = load_checkpoint(path);
  CHECK(cp.variant == LearnerVariant::dqn);
  CHECK(cp.grid_cols == 3);
  CHECK(cp.grid_rows == 1);
  CHECK(cp.net.flat_params().isApprox(net.flat_params(), 0.0));
  std::remove(path.c_str());
}

TEST_CASE("checkpoint loader rejects bad files") {
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/checkpoint.json"),
                  ConfigError);
  std::string path = temp_file("aeris_bad_checkpoint.json");
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("{\"schema_version\": 1, \"variant\": \"dqn\"}", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_checkpoint(path), ValidationError);
  std::remove(path.c_str());
}

TEST_CASE("learner variant names round trip") {
  CHECK(to_string(LearnerVariant::dqn) == "dqn");
  CHECK(to_string(LearnerVariant::actor_critic) == "actor_critic");
  CHECK(learner_variant_from_string("dqn") == LearnerVariant::dqn);
  CHECK(learner_variant_from_string("actor_critic") ==
        LearnerVariant::actor_critic);
  CHECK_THROWS_AS(learner_variant_from_string("sarsa"), ConfigError);
}
