#include "graphad/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace graphad {

namespace {

constexpr char kMagic[8] = {'G', 'A', 'D', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError("checkpoint truncated");
  return v;
}

}  // namespace

void Checkpoint::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + file.string());
  out.write(kMagic, sizeof(kMagic));
  const std::string header_str = header.dump();
  write_pod(out, static_cast<std::uint64_t>(header_str.size()));
  out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
  write_pod(out, static_cast<std::uint32_t>(arrays.size()));
  for (const auto& [name, m] : arrays) {
    write_pod(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod(out, static_cast<std::uint32_t>(m.rows()));
    write_pod(out, static_cast<std::uint32_t>(m.cols()));
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
  }
  if (!out) throw DataError("checkpoint write failed: " + file.string());
}

Checkpoint Checkpoint::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot read checkpoint: " + file.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw DataError("not a checkpoint file: " + file.string());
  Checkpoint c;
  const auto header_len = read_pod<std::uint64_t>(in);
  std::string header_str(header_len, '\0');
  in.read(header_str.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw DataError("checkpoint truncated");
  c.header = Json::parse(header_str);
  const auto count = read_pod<std::uint32_t>(in);
  c.arrays.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = read_pod<std::uint32_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(name_len));
    const auto rows = read_pod<std::uint32_t>(in);
    const auto cols = read_pod<std::uint32_t>(in);
    Mat<double> m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(m.size())));
    if (!in) throw DataError("checkpoint truncated");
    c.arrays.emplace_back(std::move(name), std::move(m));
  }
  return c;
}

const Mat<double>* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, m] : arrays)
    if (n == name) return &m;
  return nullptr;
}

void save_model(DetectorModel& model, const TrainHistory& history,
                const std::filesystem::path& file) {
  Checkpoint c;
  c.header["kind"] = model_kind_name(model.kind());
  c.header["model"] = to_json(model.config());
  c.header["input_dim"] = model.input_dim();
  c.header["best_epoch"] = history.best_epoch;
  c.header["best_val_loss"] = history.best_val_loss;
  if (auto* ocgin = dynamic_cast<OcginModel*>(&model))
    c.header["center_initialized"] = ocgin->center_initialized();
  for (auto& [name, value] : model.named_state()) c.arrays.emplace_back(name, value);
  const auto as_row = [](const std::vector<double>& v) {
    Mat<double> m(1, static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) m(0, static_cast<int>(i)) = v[i];
    return m;
  };
  c.arrays.emplace_back("history/train_loss", as_row(history.train_loss));
  c.arrays.emplace_back("history/val_loss", as_row(history.val_loss));
  c.save(file);
}

LoadedModel load_model(const std::filesystem::path& file) {
  const Checkpoint c = Checkpoint::load(file);
  const ModelKind kind = model_kind_from_name(c.header.at("kind").get<std::string>());
  const ModelConfig cfg = model_config_from_json(c.header.at("model"));
  const int input_dim = c.header.at("input_dim").get<int>();

  LoadedModel out;
  out.model = make_model(kind, cfg, input_dim, /*seed=*/0);
  if (kind == ModelKind::OCGIN && c.header.value("center_initialized", false)) {
    // Buffers include the center once it is set; mark it set, then load.
    auto* ocgin = dynamic_cast<OcginModel*>(out.model.get());
    ocgin->set_center(Mat<double>::Zero(1, cfg.gin.output_dim()));
  }
  std::vector<std::pair<std::string, Mat<double>>> state;
  for (const auto& [name, m] : c.arrays)
    if (name.rfind("history/", 0) != 0) state.emplace_back(name, m);
  out.model->load_state(state);

  out.history.best_epoch = c.header.value("best_epoch", 0);
  out.history.best_val_loss = c.header.value("best_val_loss", 0.0);
  const auto row_to_vec = [&](const char* name, std::vector<double>& dst) {
    if (const auto* m = c.find(name)) {
      dst.resize(static_cast<std::size_t>(m->cols()));
      for (int i = 0; i < m->cols(); ++i) dst[static_cast<std::size_t>(i)] = (*m)(0, i);
    }
  };
  row_to_vec("history/train_loss", out.history.train_loss);
  row_to_vec("history/val_loss", out.history.val_loss);
  out.history.epochs_run = static_cast<int>(out.history.train_loss.size());
  return out;
}

}  // namespace graphad
