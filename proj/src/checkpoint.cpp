#include "scanpath/checkpoint.hpp"

#include <fstream>
#include <map>

#include "float_io.hpp"
#include "json.hpp"
#include "scanpath/error.hpp"

namespace scanpath {

namespace {

constexpr const char* kFormat = "scanpath-checkpoint";
constexpr const char* kFrozenName = "embedding.frozen_table";

nlohmann::json config_json(const Checkpoint& c) {
  const auto& m = c.params.config;
  return {{"max_len", m.max_len},
          {"idx_vocab", m.index_vocab()},
          {"hidden_dim", m.denoiser.hidden_dim},
          {"blocks", m.denoiser.blocks},
          {"heads", m.denoiser.heads},
          {"ffn_mult", m.denoiser.ffn_mult},
          {"embedding_init_std", m.embedding_init_std},
          {"schedule", to_string(c.schedule)},
          {"t_max", c.t_max},
          {"schedule_offset", c.schedule_offset},
          {"step", c.step}};
}

void write_matrix(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) detail::write_f32_le(out, m(i, j));
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  nlohmann::json header;
  header["format"] = kFormat;
  header["version"] = 1;
  header["config"] = config_json(ckpt);
  auto& tensors = header["tensors"] = nlohmann::json::array();
  ckpt.params.visit_trainable([&](const std::string& name, const Matrix& m) {
    tensors.push_back({{"name", name}, {"shape", {m.rows(), m.cols()}}, {"dtype", "f32"}});
  });
  const Matrix& frozen = *ckpt.params.embedding.frozen;
  tensors.push_back({{"name", kFrozenName},
                     {"shape", {frozen.rows(), frozen.cols()}},
                     {"dtype", "f32"},
                     {"frozen", true}});

  // Write to a sibling file first so a crash never leaves a torn checkpoint.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << header.dump() << '\n';
    ckpt.params.visit_trainable([&](const std::string&, const Matrix& m) { write_matrix(out, m); });
    write_matrix(out, frozen);
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::string line;
  std::getline(in, line);
  nlohmann::json header;
  Checkpoint ckpt;
  try {
    header = nlohmann::json::parse(line);
    if (header.at("format") != kFormat) throw ParseError("not a checkpoint file", 1);
    const auto& c = header.at("config");
    ModelConfig m;
    m.max_len = c.at("max_len").get<int>();
    m.idx_vocab = c.at("idx_vocab").get<int>();
    m.denoiser.hidden_dim = c.at("hidden_dim").get<int>();
    m.denoiser.blocks = c.at("blocks").get<int>();
    m.denoiser.heads = c.at("heads").get<int>();
    m.denoiser.ffn_mult = c.at("ffn_mult").get<int>();
    m.embedding_init_std = c.at("embedding_init_std").get<double>();
    ckpt.schedule = parse_schedule_kind(c.at("schedule").get<std::string>());
    ckpt.t_max = c.at("t_max").get<int>();
    ckpt.schedule_offset = c.at("schedule_offset").get<double>();
    ckpt.step = c.at("step").get<long>();

    std::map<std::string, Matrix> tensors;
    std::vector<std::string> order;
    for (const auto& t : header.at("tensors")) {
      if (t.at("dtype") != "f32") throw ParseError("unsupported dtype in checkpoint", 1);
      const auto rows = t.at("shape").at(0).get<Eigen::Index>();
      const auto cols = t.at("shape").at(1).get<Eigen::Index>();
      Matrix mat(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
          if (!detail::read_f32_le(in, mat(i, j))) throw IoError("checkpoint payload truncated: " + path.string());
      tensors.emplace(t.at("name").get<std::string>(), std::move(mat));
    }

    auto frozen_it = tensors.find(kFrozenName);
    if (frozen_it == tensors.end()) throw ParseError("checkpoint lacks the frozen table", 1);
    auto frozen = std::make_shared<const Matrix>(std::move(frozen_it->second));
    ModelParams p = init_model(m, frozen, 0);
    p.visit_trainable([&](const std::string& name, Matrix& dst) {
      auto it = tensors.find(name);
      if (it == tensors.end()) throw ParseError("checkpoint lacks tensor " + name, 1);
      if (it->second.rows() != dst.rows() || it->second.cols() != dst.cols())
        throw ParseError("shape mismatch for tensor " + name, 1);
      dst = std::move(it->second);
    });
    ckpt.params = std::move(p);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed checkpoint header: ") + e.what(), 1);
  }
  return ckpt;
}

}  // namespace scanpath
