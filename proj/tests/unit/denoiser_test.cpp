#include "doctest.h"

#include <cmath>
#include <vector>

#include "scanpath/denoiser.hpp"
#include "scanpath/rng.hpp"

using namespace scanpath;

namespace {

using Rows = std::vector<std::vector<double>>;

Rows to_rows(const Matrix& m) {
  Rows r(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[i][j] = m(i, j);
  return r;
}

Rows matmul(const Rows& a, const Matrix& w, const Matrix& b) {
  Rows out(a.size(), std::vector<double>(static_cast<std::size_t>(w.cols()), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      double s = b(0, j);
      for (std::size_t k = 0; k < a[i].size(); ++k) s += a[i][k] * w(static_cast<Eigen::Index>(k), j);
      out[i][j] = s;
    }
  return out;
}

Rows norm(const Rows& x, const Matrix& g, const Matrix& b) {
  Rows out = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double mu = 0.0, var = 0.0;
    for (double v : x[i]) mu += v;
    mu /= static_cast<double>(x[i].size());
    for (double v : x[i]) var += (v - mu) * (v - mu);
    var /= static_cast<double>(x[i].size());
    for (std::size_t j = 0; j < x[i].size(); ++j)
      out[i][j] = (x[i][j] - mu) / std::sqrt(var + 1e-5) * g(0, j) + b(0, j);
  }
  return out;
}

// Single-block, single-head forward pass written out element by element.
Rows reference_forward(const DenoiserParams& p, const Matrix& z, int t, const std::vector<bool>& mask) {
  const std::size_t d = static_cast<std::size_t>(z.cols()), n = static_cast<std::size_t>(z.rows());
  Rows feat(1, std::vector<double>(d));
  for (std::size_t i = 0; i < d / 2; ++i) {
    const double freq = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(d / 2));
    feat[0][i] = std::cos(t * freq);
    feat[0][d / 2 + i] = std::sin(t * freq);
  }
  Rows hid = matmul(feat, p.time_w1, p.time_b1);
  for (double& v : hid[0]) v = v / (1.0 + std::exp(-v));
  const Rows temb = matmul(hid, p.time_w2, p.time_b2);

  Rows h = to_rows(z);
  for (auto& row : h)
    for (std::size_t j = 0; j < d; ++j) row[j] += temb[0][j];
  h = norm(h, p.ln_in_gain, p.ln_in_bias);

  const BlockParams& blk = p.blocks[0];
  const Rows a = norm(h, blk.ln1_gain, blk.ln1_bias);
  const Rows q = matmul(a, blk.w_q, blk.b_q), k = matmul(a, blk.w_k, blk.b_k), v = matmul(a, blk.w_v, blk.b_v);
  Rows mixed(n, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> w(n, 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!mask[j]) continue;
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += q[i][c] * k[j][c];
      w[j] = std::exp(s / std::sqrt(static_cast<double>(d)));
      total += w[j];
    }
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t c = 0; c < d; ++c) mixed[i][c] += w[j] / total * v[j][c];
  }
  const Rows attn = matmul(mixed, blk.w_o, blk.b_o);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < d; ++c) h[i][c] += attn[i][c];

  Rows f = matmul(norm(h, blk.ln2_gain, blk.ln2_bias), blk.w_ff1, blk.b_ff1);
  for (auto& row : f)
    for (double& x : row) x = 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0)));
  const Rows f2 = matmul(f, blk.w_ff2, blk.b_ff2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < d; ++c) h[i][c] += f2[i][c];
  return matmul(norm(h, p.ln_out_gain, p.ln_out_bias), p.w_out, p.b_out);
}

DenoiserParams small(int d, int blocks, int heads, std::uint64_t seed, double std = 0.3) {
  DenoiserConfig cfg;
  cfg.hidden_dim = d;
  cfg.blocks = blocks;
  cfg.heads = heads;
  Rng rng(seed);
  DenoiserParams p = init_denoiser(cfg, rng);
  p.visit([&](const std::string&, Matrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = std * rng.normal();
  });
  return p;
}

}  // namespace

TEST_CASE("forward pass matches an element-wise reference") {
  const DenoiserParams p = small(4, 1, 1, 8);
  Rng rng(2);
  const Matrix z = random_normal(3, 4, 1.0, rng);
  for (const auto& mask : {std::vector<bool>{true, true, true}, std::vector<bool>{true, true, false}}) {
    const Matrix out = denoiser_forward(p, z, 7, mask);
    const Rows ref = reference_forward(p, z, 7, mask);
    for (Eigen::Index i = 0; i < 3; ++i)
      for (Eigen::Index j = 0; j < 4; ++j) CHECK(out(i, j) == doctest::Approx(ref[i][j]).epsilon(1e-12));
  }
}

TEST_CASE("initial parameters follow the stated scheme") {
  DenoiserConfig cfg;
  cfg.hidden_dim = 8;
  cfg.blocks = 2;
  cfg.heads = 2;
  Rng rng(1);
  const DenoiserParams p = init_denoiser(cfg, rng);
  CHECK(p.blocks[0].w_o.isZero());
  CHECK(p.blocks[1].w_ff2.isZero());
  CHECK(p.blocks[0].b_q.isZero());
  CHECK((p.ln_in_gain.array() == 1.0).all());
  CHECK(p.blocks[0].w_q.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("padding rows do not influence real rows") {
  const DenoiserParams p = small(8, 2, 2, 3);
  Rng rng(4);
  Matrix z = random_normal(5, 8, 1.0, rng);
  const std::vector<bool> mask{true, true, true, false, false};
  const Matrix a = denoiser_forward(p, z, 3, mask);
  z.row(3).swap(z.row(4));
  z.row(4) *= 5.0;
  const Matrix b = denoiser_forward(p, z, 3, mask);
  CHECK((a.topRows(3) - b.topRows(3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("outputs stay finite for large inputs and are reproducible") {
  const DenoiserParams p = small(8, 2, 2, 5);
  Rng rng(6);
  const Matrix z = random_normal(4, 8, 1000.0, rng);
  const std::vector<bool> mask(4, true);
  const Matrix a = denoiser_forward(p, z, 100, mask);
  CHECK(a.allFinite());
  CHECK(a == denoiser_forward(p, z, 100, mask));
}

TEST_CASE("backward pass") {
  const DenoiserParams p = small(8, 1, 2, 9);
  Rng rng(10);
  const Matrix z = random_normal(4, 8, 1.0, rng);
  const std::vector<bool> mask{true, true, true, false};
  DenoiserCache cache;
  denoiser_forward(p, z, 2, mask, &cache);

  SUBCASE("zero upstream gradient gives zero gradients") {
    DenoiserParams g = zeros_like(p);
    const Matrix dz = denoiser_backward(p, cache, Matrix::Zero(4, 8), g);
    CHECK(dz.isZero());
    g.visit([](const std::string&, const Matrix& m) { CHECK(m.isZero()); });
  }
  SUBCASE("input gradient matches central differences") {
    DenoiserParams g = zeros_like(p);
    const Matrix up = random_normal(4, 8, 1.0, rng);
    const Matrix dz = denoiser_backward(p, cache, up, g);
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 8; ++j) {
        Matrix zp = z, zm = z;
        zp(i, j) += h;
        zm(i, j) -= h;
        const double num =
            ((denoiser_forward(p, zp, 2, mask).array() - denoiser_forward(p, zm, 2, mask).array()) * up.array()).sum() /
            (2 * h);
        CHECK(dz(i, j) == doctest::Approx(num).epsilon(1e-6).scale(1.0));
      }
  }
  SUBCASE("missing cache") {
    DenoiserParams g = zeros_like(p);
    CHECK_THROWS(denoiser_backward(p, DenoiserCache{}, Matrix::Zero(4, 8), g));
  }
}
