#include "support.hpp"

#include "dhogm/error.hpp"
#include "dhogm/model.hpp"
#include "dhogm/model_io.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>

using namespace dhogm;

namespace {

ErrorCode code_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

/// Forward pass written with explicit per-layer loops and its own offset
/// bookkeeping.
double oracle_forward(const MlpModel &m, const MlpInput &x) {
  std::vector<double> a(x.begin(), x.end());
  std::size_t off = 0;
  const auto &L = m.layer_sizes;
  for (std::size_t l = 1; l < L.size(); ++l) {
    const std::size_t in = L[l - 1];
    const std::size_t out = L[l];
    std::vector<double> z(out, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      double acc = 0.0;
      for (std::size_t i = 0; i < in; ++i) {
        acc += m.params[off + o * in + i] * a[i];
      }
      z[o] = acc + m.params[off + in * out + o];
    }
    off += in * out + out;
    if (l + 1 < L.size()) {
      for (auto &v : z) {
        v = v > 0.0 ? v : 0.0;
      }
    }
    a = z;
  }
  return 1.0 / (1.0 + std::exp(-a[0]));
}

double mean_bce(const MlpModel &m, const std::vector<MlpInput> &xs, const std::vector<double> &ys) {
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double p = oracle_forward(m, xs[i]);
    s += -(ys[i] * std::log(p) + (1 - ys[i]) * std::log(1 - p));
  }
  return s / static_cast<double>(xs.size());
}

/// 3 -> 2 -> 1 network whose output logit is exactly the axial input.
MlpModel identity_logit_mlp() {
  MlpModel m = zero_mlp(std::vector<std::size_t>{3, 2, 1});
  // hidden: h0 = relu(x0), h1 = relu(-x0)
  m.params[0] = 1.0;
  m.params[3] = -1.0;
  // output = h0 - h1
  m.params[8] = 1.0;
  m.params[9] = -1.0;
  return m;
}

double logit(double p) { return std::log(p / (1.0 - p)); }

SliceFeatureSeries series_with_probabilities(const std::vector<double> &p2) {
  SliceFeatureSeries s;
  for (double p : p2) {
    s.triplets.push_back({logit(p), 0.0, 0.0});
    s.degenerate.push_back(false);
  }
  return s;
}

} // namespace

TEST_CASE("parameter count") {
  CHECK(parameter_count(kDefaultLayers) == 209);
  CHECK(make_mlp(kDefaultLayers, {}).n_params() == 209);
  CHECK((3 + 1) * 10 + (10 + 1) * 14 + (14 + 1) * 1 == 209);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 30; ++t) {
    std::vector<std::size_t> layers{3};
    for (std::size_t h = rng() % 4; h > 0; --h) {
      layers.push_back(1 + rng() % 20);
    }
    layers.push_back(1);
    std::size_t expect = 0;
    for (std::size_t l = 1; l < layers.size(); ++l) {
      expect += (layers[l - 1] + 1) * layers[l];
    }
    CHECK(parameter_count(layers) == expect);
  }
  CHECK(code_of([] { parameter_count(std::vector<std::size_t>{2, 4, 1}); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { parameter_count(std::vector<std::size_t>{3, 0, 1}); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("forward pass") {
  const MlpModel z = zero_mlp();
  CHECK(mlp_forward(z, MlpInput{-3.0, 0.2, 9.0}) == 0.5);
  CHECK(mlp_forward(z, MlpInput{0.0, 0.0, 0.0}) == 0.5);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    MlpTrainConfig cfg;
    cfg.seed = seed;
    const MlpModel m = make_mlp(kDefaultLayers, cfg);
    for (const double p : m.params) {
      CHECK(std::abs(p) <= 0.5);
    }
    for (int i = 0; i < 20; ++i) {
      const MlpInput x{dist(rng), dist(rng), dist(rng)};
      CHECK(std::abs(mlp_forward(m, x) - oracle_forward(m, x)) <= 1e-9);
    }
  }
  CHECK(code_of([&] {
          mlp_forward(z, MlpInput{std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0});
        }) == ErrorCode::NonFiniteInput);
  CHECK(code_of([&] {
          mlp_forward(z, MlpInput{0.0, std::numeric_limits<double>::infinity(), 0.0});
        }) == ErrorCode::NonFiniteInput);
}

TEST_CASE("analytic gradient matches central finite differences") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1.5, 1.5);
  for (std::uint64_t draw = 0; draw < 5; ++draw) {
    MlpTrainConfig cfg;
    cfg.seed = 100 + draw;
    MlpModel m = make_mlp(kDefaultLayers, cfg);
    std::vector<MlpInput> xs(16);
    std::vector<double> ys(16);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      xs[i] = {dist(rng), dist(rng), dist(rng)};
      ys[i] = static_cast<double>(rng() % 2);
    }
    const auto lg = mlp_loss_gradient(m, xs, ys);
    CHECK(lg.loss == doctest::Approx(mean_bce(m, xs, ys)).epsilon(1e-10));
    const double eps = 1e-5;
    for (std::size_t k = 0; k < m.params.size(); ++k) {
      const double keep = m.params[k];
      m.params[k] = keep + eps;
      const double up = mean_bce(m, xs, ys);
      m.params[k] = keep - eps;
      const double down = mean_bce(m, xs, ys);
      m.params[k] = keep;
      const double fd = (up - down) / (2 * eps);
      const double a = lg.gradient[k];
      const double denom = std::max({std::abs(a), std::abs(fd), 1e-8});
      CHECK(std::abs(a - fd) / denom < 1e-4);
    }
  }
}

TEST_CASE("training") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> jitter(0.0, 0.1);
  std::vector<SliceFeatureSeries> feats;
  std::vector<QualityLabel> labels;
  for (int s = 0; s < 8; ++s) {
    const bool poor = s % 2 == 1;
    SliceFeatureSeries f;
    for (int i = 0; i < 10; ++i) {
      const double c = poor ? 0.0 : -1.0;
      f.triplets.push_back({c + jitter(rng), c + jitter(rng), c + jitter(rng)});
      f.degenerate.push_back(false);
    }
    feats.push_back(f);
    labels.push_back(poor ? QualityLabel::Poor : QualityLabel::Good);
  }

  SUBCASE("separable toy set reaches 100% slice accuracy within 500 epochs") {
    MlpTrainConfig cfg;
    cfg.epochs = 500;
    const auto r = mlp_train(feats, labels, cfg);
    for (std::size_t s = 0; s < feats.size(); ++s) {
      for (const auto &t : feats[s].triplets) {
        const bool says_poor = mlp_forward(r.model, t) > 0.5;
        CHECK(says_poor == (labels[s] == QualityLabel::Poor));
      }
    }
  }
  SUBCASE("default full-batch descent never increases the loss") {
    const auto r = mlp_train(feats, labels, MlpTrainConfig{});
    REQUIRE(r.loss_history.size() == 2001);
    for (std::size_t i = 1; i < r.loss_history.size(); ++i) {
      CHECK(r.loss_history[i] <= r.loss_history[i - 1] + 1e-12);
    }
    CHECK(r.model.final_loss == r.loss_history.back());
  }
  SUBCASE("bit reproducible per seed, seed-sensitive otherwise") {
    MlpTrainConfig cfg;
    cfg.epochs = 50;
    const auto a = mlp_train(feats, labels, cfg);
    const auto b = mlp_train(feats, labels, cfg);
    CHECK(a.model.params == b.model.params);
    cfg.seed = 43;
    CHECK(mlp_train(feats, labels, cfg).model.params != a.model.params);
  }
  SUBCASE("uninformative data converges to the class prior") {
    std::vector<SliceFeatureSeries> same;
    std::vector<QualityLabel> y;
    for (int s = 0; s < 8; ++s) {
      SliceFeatureSeries f;
      for (int i = 0; i < 10; ++i) {
        f.triplets.push_back({-0.5, -0.5, -0.5});
        f.degenerate.push_back(false);
      }
      same.push_back(f);
      y.push_back(s < 6 ? QualityLabel::Good : QualityLabel::Poor);
    }
    const auto r = mlp_train(same, y, MlpTrainConfig{});
    CHECK(std::abs(mlp_forward(r.model, MlpInput{-0.5, -0.5, -0.5}) - 0.25) <= 0.1);
  }
  SUBCASE("degenerate triplets are skipped") {
    auto f2 = feats;
    f2[0].triplets[0].axial = std::numeric_limits<double>::quiet_NaN();
    f2[0].degenerate[0] = true;
    MlpTrainConfig cfg;
    cfg.epochs = 5;
    CHECK_NOTHROW(mlp_train(f2, labels, cfg));
  }
  SUBCASE("errors") {
    const std::vector<QualityLabel> all_good(8, QualityLabel::Good);
    CHECK(code_of([&] { mlp_train(feats, all_good, MlpTrainConfig{}); }) == ErrorCode::ClassMissing);
    const std::vector<SliceFeatureSeries> three(feats.begin(), feats.begin() + 3);
    const std::vector<QualityLabel> y3{QualityLabel::Good, QualityLabel::Poor, QualityLabel::Good};
    CHECK(code_of([&] { mlp_train(three, y3, MlpTrainConfig{}); }) == ErrorCode::InsufficientData);
  }
}

TEST_CASE("predict_2d voting") {
  const MlpModel m = identity_logit_mlp();
  CHECK(mlp_forward(m, MlpInput{logit(0.3), 0.0, 0.0}) == doctest::Approx(0.3).epsilon(1e-12));

  SUBCASE("unanimous") {
    const auto d = predict_2d(m, series_with_probabilities(std::vector<double>(60, 0.1)));
    CHECK(d.label == QualityLabel::Good);
    CHECK(d.p_c1 == doctest::Approx(0.9).epsilon(1e-12));
  }
  SUBCASE("31 Poor votes beat 29 Good votes whatever the mean") {
    std::vector<double> p(31, 0.51);
    p.insert(p.end(), 29, 0.01);
    const auto d = predict_2d(m, series_with_probabilities(p));
    CHECK(d.label == QualityLabel::Poor);
    CHECK(d.p_c1 > 0.5);  // the mean disagrees with the vote
    CHECK(d.p_c1 + d.p_c2 == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("ties go to Poor") {
    std::vector<double> p(30, 0.6);
    p.insert(p.end(), 30, 0.4);
    CHECK(predict_2d(m, series_with_probabilities(p)).label == QualityLabel::Poor);
  }
  SUBCASE("permutation invariance") {
    std::mt19937_64 rng(4);
    std::vector<double> p(60);
    for (auto &x : p) {
      x = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
    }
    const auto ref = predict_2d(m, series_with_probabilities(p));
    for (int t = 0; t < 10; ++t) {
      std::shuffle(p.begin(), p.end(), rng);
      const auto d = predict_2d(m, series_with_probabilities(p));
      CHECK(d.label == ref.label);
      CHECK(d.p_c2 == doctest::Approx(ref.p_c2).epsilon(1e-12));
    }
  }
  SUBCASE("unscorable when more than half the slices are degenerate") {
    auto s = series_with_probabilities(std::vector<double>(60, 0.2));
    for (std::size_t i = 0; i < 31; ++i) {
      s.degenerate[i] = true;
      s.triplets[i].axial = std::numeric_limits<double>::quiet_NaN();
    }
    CHECK_FALSE(predict_2d(m, s).scorable());
    s.degenerate[30] = false;
    s.triplets[30].axial = logit(0.2);
    const auto d = predict_2d(m, s);
    CHECK(d.label == QualityLabel::Good);
    CHECK(d.p_c2 == doctest::Approx(0.2).epsilon(1e-12));
  }
}

TEST_CASE("threshold fitting") {
  using QL = QualityLabel;
  SUBCASE("separable example picks the widest midpoint") {
    const std::vector<double> d{-0.90, -0.85, -0.80, -0.30, -0.20};
    const std::vector<QL> y{QL::Good, QL::Good, QL::Good, QL::Poor, QL::Poor};
    const auto t = fit_threshold(d, y);
    CHECK(t.t_star == doctest::Approx(-0.55).epsilon(1e-15));
    CHECK(t.youden_j == 1.0);
    CHECK(t.good.count == 3);
    CHECK(t.good.mean == doctest::Approx(-0.85));
    CHECK(t.good.sd == doctest::Approx(0.05));
    CHECK(t.scale > 0.0);
  }
  SUBCASE("one subject per class") {
    const std::vector<double> d{-0.9, -0.1};
    const std::vector<QL> y{QL::Good, QL::Poor};
    CHECK(fit_threshold(d, y).t_star == doctest::Approx(-0.5).epsilon(1e-15));
  }
  SUBCASE("identical class distributions give J near 0") {
    std::vector<double> d;
    std::vector<QL> y;
    for (int i = 0; i < 10; ++i) {
      d.push_back(i);
      d.push_back(i);
      y.push_back(QL::Good);
      y.push_back(QL::Poor);
    }
    const auto t = fit_threshold(d, y);
    CHECK(std::abs(t.youden_j) <= 0.1 + 1e-12);
    CHECK(std::isfinite(t.t_star));
  }
  SUBCASE("scan matches a brute-force search and separable sets reach J = 1") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> dist(-1.0, 0.0);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 2 + rng() % 19;
      std::vector<double> d(n);
      std::vector<QL> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        d[i] = std::round(dist(rng) * 20.0) / 20.0;  // force ties
        y[i] = i % 2 ? QL::Poor : QL::Good;
      }
      const auto t = fit_threshold(d, y);
      // brute force: every value, every midpoint, and +inf as thresholds
      double best = -1.0;
      std::vector<double> cands(d);
      for (double a : d) {
        for (double b : d) {
          cands.push_back(0.5 * (a + b));
        }
      }
      cands.push_back(std::numeric_limits<double>::infinity());
      for (double c : cands) {
        std::size_t tp = 0, tn = 0, pos = 0, neg = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const bool good = d[i] < c;
          if (y[i] == QL::Poor) {
            ++pos;
            tp += good ? 0 : 1;
          } else {
            ++neg;
            tn += good ? 1 : 0;
          }
        }
        best = std::max(best, double(tp) / double(pos) + double(tn) / double(neg) - 1.0);
      }
      CHECK(t.youden_j == doctest::Approx(best).epsilon(1e-12));
      CHECK(youden_index(d, y, t.t_star) == doctest::Approx(best).epsilon(1e-12));

      // strictly separable variant
      for (std::size_t i = 0; i < n; ++i) {
        d[i] = y[i] == QL::Poor ? 0.5 + dist(rng) * -0.4 : dist(rng);
      }
      CHECK(fit_threshold(d, y).youden_j == 1.0);
    }
  }
  SUBCASE("monotone transforms preserve predicted labels") {
    const std::vector<double> d{-0.7, -0.65, -0.4, -0.61, -0.2, -0.35};
    const std::vector<QL> y{QL::Good, QL::Good, QL::Poor, QL::Good, QL::Poor, QL::Poor};
    const auto f = [](double x) { return std::exp(3.0 * x) + 2.0; };
    std::vector<double> fd;
    for (double x : d) {
      fd.push_back(f(x));
    }
    const auto t = fit_threshold(d, y);
    const auto ft = fit_threshold(fd, y);
    CHECK(ft.youden_j == t.youden_j);
    for (double probe : d) {
      CHECK(predict_3d(t, probe).label == predict_3d(ft, f(probe)).label);
    }
  }
  SUBCASE("errors") {
    const std::vector<double> d{-0.5, -0.4};
    CHECK(code_of([&] { fit_threshold(d, std::vector<QL>{QL::Good, QL::Good}); }) ==
          ErrorCode::ClassMissing);
    const std::vector<double> bad{-0.5, std::numeric_limits<double>::quiet_NaN()};
    CHECK(code_of([&] { fit_threshold(bad, std::vector<QL>{QL::Good, QL::Poor}); }) ==
          ErrorCode::NonFiniteFeature);
  }
}

TEST_CASE("predict_3d") {
  ThresholdModel t;
  t.t_star = -0.6;
  t.scale = 0.05;
  const auto at = predict_3d(t, -0.6);
  CHECK(at.label == QualityLabel::Poor);
  CHECK(at.p_c2 == 0.5);
  const auto far = predict_3d(t, -0.6 - 10 * 0.05);
  CHECK(far.label == QualityLabel::Good);
  CHECK(far.p_c1 == doctest::Approx(1.0 / (1.0 + std::exp(-10.0))).epsilon(1e-12));
  CHECK(far.p_c1 == doctest::Approx(0.99995).epsilon(1e-5));
  CHECK(predict_3d(t, -1e300).p_c1 == 1.0);
  for (double d : {-2.0, -0.61, -0.59, 3.0}) {
    const auto p = predict_3d(t, d);
    CHECK(p.p_c1 + p.p_c2 == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(code_of([&] { predict_3d(t, std::numeric_limits<double>::infinity()); }) ==
        ErrorCode::NonFiniteFeature);
}

TEST_CASE("model JSON round trip and compatibility guard") {
  TrainedModel m;
  MlpTrainConfig cfg;
  cfg.seed = 5;
  m.mlp = make_mlp(kDefaultLayers, cfg);
  m.mlp.final_loss = 0.125;
  m.threshold.t_star = -0.55;
  m.threshold.scale = 0.1;
  m.threshold.youden_j = 1.0;
  m.threshold.good = {3, -0.85, 0.05};
  const auto j = model_to_json(m);
  CHECK(j["format_version"] == 1);
  CHECK(j["mlp"]["layer_sizes"] == nlohmann::json::array({3, 10, 14, 1}));
  CHECK(j["mlp"]["seed"] == 5);
  CHECK(j["feature_config"]["n_bins"] == 100);
  CHECK(j["feature_config"]["cuboid"] == nlohmann::json::array({96, 128, 128}));

  const auto back = model_from_json(j);
  CHECK(back.mlp.params == m.mlp.params);
  CHECK(back.mlp.train_config == m.mlp.train_config);
  CHECK(back.threshold.t_star == m.threshold.t_star);
  CHECK(back.threshold.good.sd == m.threshold.good.sd);
  CHECK(model_to_json(back).dump() == j.dump());

  FeatureConfig other;
  other.n_bins = 64;
  CHECK(code_of([&] { require_compatible(back, other); }) == ErrorCode::FeatureConfigMismatch);
  CHECK_NOTHROW(require_compatible(back, FeatureConfig{}));

  auto broken = j;
  broken["mlp"]["params"].erase(0);
  CHECK(code_of([&] { model_from_json(broken); }) == ErrorCode::MalformedModel);
  broken = j;
  broken["format_version"] = 2;
  CHECK(code_of([&] { model_from_json(broken); }) == ErrorCode::MalformedModel);
  broken = j;
  broken["threshold"]["scale"] = 0.0;
  CHECK(code_of([&] { model_from_json(broken); }) == ErrorCode::MalformedModel);
}
