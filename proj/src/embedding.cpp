#include "scanpath/embedding.hpp"

#include <cmath>
#include <fstream>

#include "float_io.hpp"
#include "json.hpp"
#include "scanpath/error.hpp"
#include "scanpath/rng.hpp"

namespace scanpath {

namespace {

void check_index(int value, Eigen::Index rows, const char* table, std::size_t position) {
  if (value < 0 || value >= rows)
    throw ValidationError(std::string(table) + " index " + std::to_string(value) + " at position " +
                          std::to_string(position) + " outside table of " + std::to_string(rows) +
                          " rows");
}

}  // namespace

Embedded embed(const EncodedInstance& inst, const EmbeddingParams& p) {
  if (!p.frozen) throw ConfigError("frozen token table not set");
  const auto len = static_cast<Eigen::Index>(inst.seq_len);
  const Eigen::Index d = p.idx_table.cols();
  Embedded e{Matrix(len, d), Matrix(len, d), Matrix(len, d)};
  Matrix frozen_rows(len, p.frozen->cols());
  for (Eigen::Index i = 0; i < len; ++i) {
    const auto s = static_cast<std::size_t>(i);
    check_index(inst.x_idx[s], p.idx_table.rows(), "word", s);
    check_index(inst.x_bert[s], p.frozen->rows(), "token", s);
    check_index(inst.x_pos[s], p.pos_table.rows(), "position", s);
    e.idx.row(i) = p.idx_table.row(inst.x_idx[s]);
    frozen_rows.row(i) = p.frozen->row(inst.x_bert[s]);
  }
  e.context.noalias() = frozen_rows * p.proj_weight;
  for (Eigen::Index i = 0; i < len; ++i)
    e.context.row(i) += p.proj_bias.row(0) + p.pos_table.row(inst.x_pos[static_cast<std::size_t>(i)]);
  e.total = e.idx + e.context;
  return e;
}

Matrix sample_z0(const Matrix& total, double beta0, Rng& rng, const std::vector<bool>& rows) {
  Matrix z = total;
  if (beta0 <= 0.0) return z;
  const double scale = std::sqrt(beta0);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    if (!rows.empty() && !rows[static_cast<std::size_t>(i)]) continue;
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) += scale * rng.normal();
  }
  return z;
}

Matrix round_logits(const Matrix& z, const Matrix& idx_table) {
  return z * idx_table.transpose();
}

std::vector<int> round_argmax(const Matrix& z, const Matrix& idx_table) {
  const Matrix logits = round_logits(z, idx_table);
  std::vector<int> out(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index v = 1; v < logits.cols(); ++v)
      if (logits(i, v) > logits(i, best)) best = v;
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

Matrix load_frozen_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  Eigen::Index n = 0, d = 0;
  try {
    auto j = nlohmann::json::parse(header);
    n = j.at("vocab").get<Eigen::Index>();
    d = j.at("dim").get<Eigen::Index>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad embedding header in " + path.string() + ": " + e.what(), 1);
  }
  if (n <= 0 || d <= 0) throw ParseError("embedding header must have positive vocab and dim", 1);
  Matrix table(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (!detail::read_f32_le(in, table(i, j)))
        throw IoError("embedding payload truncated in " + path.string());
  return table;
}

void save_frozen_table(const Matrix& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  nlohmann::json j{{"vocab", table.rows()}, {"dim", table.cols()}};
  out << j.dump() << '\n';
  for (Eigen::Index i = 0; i < table.rows(); ++i)
    for (Eigen::Index k = 0; k < table.cols(); ++k) detail::write_f32_le(out, table(i, k));
  if (!out) throw IoError("write failed: " + path.string());
}

Matrix random_frozen_table(int vocab_size, int dim, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0xF0F0));
  return random_normal(vocab_size, dim, 1.0, rng);
}

}  // namespace scanpath
