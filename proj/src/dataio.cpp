#include "mhfc/dataio.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mhfc/random.hpp"

namespace mhfc {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<int> FeatureDataset::class_ids() const {
  std::vector<int> out;
  out.reserve(class_index.size());
  for (const auto& [cid, _] : class_index) out.push_back(cid);
  return out;
}

namespace {

void ensure_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite())
    throw NonFiniteData(what + ": non-finite value encountered");
}

void build_class_index(FeatureDataset& ds) {
  ds.class_index.clear();
  for (std::size_t i = 0; i < ds.labels.size(); ++i)
    ds.class_index[ds.labels[i]].push_back(static_cast<int>(i));
}

void validate_dataset(FeatureDataset& ds, const std::string& origin) {
  if (ds.heads.empty()) throw ManifestParseError(origin + ": no heads");
  const Eigen::Index n = ds.heads[0].matrix.cols();
  const Eigen::Index d = ds.heads[0].matrix.rows();
  for (const HeadFeatures& h : ds.heads) {
    if (h.matrix.cols() != n)
      throw SampleCountMismatch(origin + ": head sample counts differ (" +
                                std::to_string(h.matrix.cols()) + " vs " +
                                std::to_string(n) + ")");
    if (h.matrix.rows() != d)
      throw HeadDimMismatch(origin + ": head dims differ (" +
                            std::to_string(h.matrix.rows()) + " vs " +
                            std::to_string(d) + ")");
    ensure_finite(h.matrix, origin);
  }
  if (static_cast<Eigen::Index>(ds.labels.size()) != n)
    throw SampleCountMismatch(origin + ": " + std::to_string(ds.labels.size()) +
                              " labels for " + std::to_string(n) + " samples");
  build_class_index(ds);
}

std::uint32_t read_u32_le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_u32_le(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {
      static_cast<unsigned char>(v & 0xFF),
      static_cast<unsigned char>((v >> 8) & 0xFF),
      static_cast<unsigned char>((v >> 16) & 0xFF),
      static_cast<unsigned char>((v >> 24) & 0xFF)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

float f32_from_le(const unsigned char* b) {
  const std::uint32_t u = static_cast<std::uint32_t>(b[0]) |
                          (static_cast<std::uint32_t>(b[1]) << 8) |
                          (static_cast<std::uint32_t>(b[2]) << 16) |
                          (static_cast<std::uint32_t>(b[3]) << 24);
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

void f32_to_le(float f, unsigned char* b) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  b[0] = static_cast<unsigned char>(u & 0xFF);
  b[1] = static_cast<unsigned char>((u >> 8) & 0xFF);
  b[2] = static_cast<unsigned char>((u >> 16) & 0xFF);
  b[3] = static_cast<unsigned char>((u >> 24) & 0xFF);
}

constexpr unsigned char kMagic[4] = {0x4D, 0x48, 0x46, 0x43};  // "MHFC"

}  // namespace

Matrix read_fvec(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw HeadFileMissing("cannot open " + path.string());
  unsigned char magic[4];
  in.read(reinterpret_cast<char*>(magic), 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw BadMagic(path.string() + ": not an MHFC feature file");
  const std::uint32_t version = read_u32_le(in);
  if (version != 1)
    throw BadVersion(path.string() + ": unsupported version " +
                     std::to_string(version));
  const std::uint32_t n_samples = read_u32_le(in);
  const std::uint32_t dim = read_u32_le(in);
  if (!in) throw IoError(path.string() + ": truncated header");
  Matrix out(dim, n_samples);
  std::vector<unsigned char> buf(static_cast<std::size_t>(dim) * 4);
  for (std::uint32_t n = 0; n < n_samples; ++n) {
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    if (!in) throw IoError(path.string() + ": truncated payload");
    for (std::uint32_t j = 0; j < dim; ++j)
      out(j, n) = static_cast<double>(f32_from_le(buf.data() + j * 4));
  }
  return out;
}

void write_fvec(const fs::path& path, const Matrix& features) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(kMagic), 4);
  write_u32_le(out, 1);
  write_u32_le(out, static_cast<std::uint32_t>(features.cols()));
  write_u32_le(out, static_cast<std::uint32_t>(features.rows()));
  std::vector<unsigned char> buf(static_cast<std::size_t>(features.rows()) * 4);
  for (Eigen::Index n = 0; n < features.cols(); ++n) {
    for (Eigen::Index j = 0; j < features.rows(); ++j)
      f32_to_le(static_cast<float>(features(j, n)),
                buf.data() + static_cast<std::size_t>(j) * 4);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

Matrix read_csv_head(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw HeadFileMissing("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ManifestParseError(path.string() + ": bad CSV value '" + cell +
                                 "'");
      }
    }
    if (!rows.empty() && row.size() != rows[0].size())
      throw ManifestParseError(path.string() + ": ragged CSV rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ManifestParseError(path.string() + ": empty CSV");
  Matrix out(static_cast<Eigen::Index>(rows[0].size()),
             static_cast<Eigen::Index>(rows.size()));
  for (std::size_t n = 0; n < rows.size(); ++n)
    for (std::size_t j = 0; j < rows[n].size(); ++j)
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n)) =
          rows[n][j];
  return out;
}

std::vector<int> read_labels(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw HeadFileMissing("cannot open " + path.string());
  std::vector<int> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(std::stoi(line));
    } catch (const std::exception&) {
      throw ManifestParseError(path.string() + ": bad label line '" + line +
                               "'");
    }
  }
  return out;
}

void write_labels(const fs::path& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (int l : labels) out << l << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

FeatureDataset load_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in)
    throw ManifestParseError("cannot open manifest " + manifest_path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ManifestParseError(manifest_path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("version") ||
      !doc.contains("labels") || !doc.contains("heads") ||
      !doc["heads"].is_array() || doc["heads"].empty())
    throw ManifestParseError(manifest_path.string() +
                             ": expected {version, labels, heads[...]}");
  if (doc["version"] != 1)
    throw ManifestParseError(manifest_path.string() +
                             ": unsupported manifest version");
  const fs::path base = manifest_path.parent_path();
  FeatureDataset ds;
  int idx = 1;
  for (const auto& h : doc["heads"]) {
    if (!h.is_object() || !h.contains("name") || !h.contains("path"))
      throw ManifestParseError(manifest_path.string() +
                               ": head entries need name and path");
    const fs::path p = base / h["path"].get<std::string>();
    if (!fs::exists(p)) throw HeadFileMissing(p.string() + " does not exist");
    HeadFeatures hf;
    hf.head_index = idx++;
    hf.matrix = (p.extension() == ".fvec") ? read_fvec(p) : read_csv_head(p);
    ds.heads.push_back(std::move(hf));
    ds.head_names.push_back(h["name"].get<std::string>());
  }
  const fs::path labels_path = base / doc["labels"].get<std::string>();
  if (!fs::exists(labels_path))
    throw HeadFileMissing(labels_path.string() + " does not exist");
  ds.labels = read_labels(labels_path);
  validate_dataset(ds, manifest_path.string());
  return ds;
}

namespace {

// Orthogonal map with plane rotation angles <= 2*atan(shift/2) ~ shift:
// Cayley transform of a spectrally normalized random skew matrix scaled by
// `shift`. Exactly the identity at shift = 0.
Matrix random_small_rotation(int d, double shift, RandomStream& rng) {
  Matrix G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = rng.gaussian();
  Matrix S = G - G.transpose();
  const double smax = Eigen::JacobiSVD<Matrix>(S).singularValues()(0);
  if (smax <= 0.0 || shift == 0.0) return Matrix::Identity(d, d);
  const Matrix T = (shift / smax) * S;
  const Matrix A = Matrix::Identity(d, d) - 0.5 * T;
  const Matrix B = Matrix::Identity(d, d) + 0.5 * T;
  // Q = B A^-1 via A^T Q^T = B^T
  return A.transpose().partialPivLu().solve(B.transpose()).transpose();
}

}  // namespace

FeatureDataset generate_synthetic(const SynthConfig& cfg) {
  if (cfg.n_classes < 1 || cfg.samples_per_class < 1 || cfg.raw_dim < 1 ||
      cfg.n_heads < 1)
    throw InvalidConfig("generate_synthetic: counts must be >= 1");
  if (cfg.class_separation < 0.0 || cfg.head_shift < 0.0 ||
      cfg.noise_sigma < 0.0)
    throw InvalidConfig("generate_synthetic: scales must be >= 0");
  RandomStream rng(cfg.seed);
  const int d = cfg.raw_dim;
  const int C = cfg.n_classes;
  const int per = cfg.samples_per_class;
  const int H = cfg.n_heads;
  const int N = C * per;

  Matrix mu(d, C);
  for (int c = 0; c < C; ++c)
    for (int j = 0; j < d; ++j)
      mu(j, c) = cfg.class_separation * rng.gaussian();

  std::vector<Matrix> Q;
  std::vector<Vector> b;
  for (int h = 0; h < H; ++h) {
    Q.push_back(random_small_rotation(d, cfg.head_shift, rng));
    Vector dir(d);
    for (int j = 0; j < d; ++j) dir[j] = rng.gaussian();
    const double norm = dir.norm();
    b.push_back(norm > 0.0 ? Vector(cfg.head_shift * dir / norm)
                           : Vector(Vector::Zero(d)));
  }

  FeatureDataset ds;
  for (int h = 0; h < H; ++h) {
    HeadFeatures hf;
    hf.head_index = h + 1;
    hf.matrix.resize(d, N);
    ds.heads.push_back(std::move(hf));
    ds.head_names.push_back("head" + std::to_string(h));
  }
  ds.labels.resize(static_cast<std::size_t>(N));
  Vector eps(d);
  for (int c = 0; c < C; ++c)
    for (int n = 0; n < per; ++n) {
      const int col = c * per + n;
      ds.labels[static_cast<std::size_t>(col)] = c;
      for (int h = 0; h < H; ++h) {
        for (int j = 0; j < d; ++j)
          eps[j] = cfg.noise_sigma * rng.gaussian();
        ds.heads[static_cast<std::size_t>(h)].matrix.col(col) =
            Q[static_cast<std::size_t>(h)] * (mu.col(c) + eps) +
            b[static_cast<std::size_t>(h)];
      }
    }
  build_class_index(ds);
  return ds;
}

void write_results(const RunSummary& summary, const json& config,
                   const fs::path& path) {
  if (summary.per_episode_accuracy.empty())
    throw EmptyList("write_results: no episodes");
  json doc;
  doc["config"] = config;
  doc["per_episode"] = summary.per_episode_accuracy;
  doc["mean_accuracy"] = summary.mean;
  doc["ci95"] = summary.ci95;
  doc["n_episodes"] = summary.n_episodes;
  doc["elapsed_seconds"] = summary.elapsed_seconds;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

void write_features(const CollaborativeFeatures& Z,
                    const std::vector<int>& labels, const fs::path& path) {
  if (static_cast<Eigen::Index>(labels.size()) != Z.matrix.cols())
    throw DimensionMismatch("write_features: " + std::to_string(labels.size()) +
                            " labels for " + std::to_string(Z.matrix.cols()) +
                            " feature columns");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "label";
  for (Eigen::Index j = 0; j < Z.matrix.rows(); ++j) out << ",f" << j;
  out << '\n';
  out.precision(17);
  for (Eigen::Index n = 0; n < Z.matrix.cols(); ++n) {
    out << labels[static_cast<std::size_t>(n)];
    for (Eigen::Index j = 0; j < Z.matrix.rows(); ++j)
      out << ',' << Z.matrix(j, n);
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::filesystem::path write_synth_dataset(const SynthConfig& cfg,
                                          const fs::path& out_dir) {
  const FeatureDataset ds = generate_synthetic(cfg);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec && !fs::is_directory(out_dir))
    throw IoError("cannot create " + out_dir.string());
  json heads = json::array();
  for (int h = 0; h < ds.n_heads(); ++h) {
    const std::string fname = "head" + std::to_string(h) + ".fvec";
    write_fvec(out_dir / fname, ds.heads[static_cast<std::size_t>(h)].matrix);
    heads.push_back({{"name", ds.head_names[static_cast<std::size_t>(h)]},
                     {"path", fname}});
  }
  write_labels(out_dir / "labels.txt", ds.labels);
  json manifest;
  manifest["version"] = 1;
  manifest["labels"] = "labels.txt";
  manifest["heads"] = heads;
  const fs::path mpath = out_dir / "manifest.json";
  std::ofstream out(mpath);
  if (!out) throw IoError("cannot write " + mpath.string());
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + mpath.string());
  return mpath;
}

}  // namespace mhfc
