#include "subdiff/composite_models.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace subdiff {

namespace {

CompositeModel model_of(const Dataset& ds) { return CompositeModel::from_name(model_kind_name(ds.kind), ds.shape); }

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  require(end != s.c_str() && *end == '\0', ErrorCode::io, "dataset: bad number '" + s + "'");
  return v;
}

constexpr char kMagic[4] = {'S', 'D', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void save_dataset_csv(const Dataset& ds, const std::string& path) {
  const CompositeModel model = model_of(ds);
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::io, "cannot open '" + path + "' for writing");
  out << "variant," << model.name() << "\n";
  out << "shape";
  for (int s : ds.shape) out << ',' << s;
  out << "\nm," << ds.size() << "\nseed," << ds.seed << "\n";
  for (int j = 0; j < model.feature_dim(); ++j) out << 'f' << j << ',';
  out << "b\n";
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    for (int j = 0; j < model.feature_dim(); ++j) out << fmt17(ds.features(j, i)) << ',';
    out << fmt17(ds.b[i]) << '\n';
  }
  require(static_cast<bool>(out), ErrorCode::io, "write failed for '" + path + "'");
}

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::io, "cannot open '" + path + "'");
  std::string line;
  auto header = [&](const char* key) {
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::io, "dataset: truncated header");
    auto parts = split(line, ',');
    require(!parts.empty() && parts[0] == key, ErrorCode::io, std::string("dataset: expected header '") + key + "'");
    parts.erase(parts.begin());
    return parts;
  };
  Dataset ds;
  const auto variant = header("variant");
  require(variant.size() == 1, ErrorCode::io, "dataset: bad variant line");
  ds.kind = model_kind_from_name(variant[0]);
  for (const auto& s : header("shape")) ds.shape.push_back(std::stoi(s));
  const auto m = static_cast<Eigen::Index>(std::stoll(header("m").at(0)));
  ds.seed = std::stoull(header("seed").at(0));
  const CompositeModel model = model_of(ds);
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::io, "dataset: missing column header");
  ds.features.resize(model.feature_dim(), m);
  ds.b.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::io, "dataset: truncated rows");
    const auto parts = split(line, ',');
    require(static_cast<int>(parts.size()) == model.feature_dim() + 1, ErrorCode::io, "dataset: bad row width");
    for (int j = 0; j < model.feature_dim(); ++j) ds.features(j, i) = parse_double(parts[static_cast<std::size_t>(j)]);
    ds.b[i] = parse_double(parts.back());
  }
  return ds;
}

void save_dataset_binary(const Dataset& ds, const std::string& path) {
  const CompositeModel model = model_of(ds);
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::io, "cannot open '" + path + "' for writing");
  auto put = [&](const auto& v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
  out.write(kMagic, 4);
  put(kVersion);
  put(static_cast<std::uint32_t>(ds.kind));
  put(static_cast<std::uint32_t>(ds.shape.size()));
  for (int s : ds.shape) put(static_cast<std::uint32_t>(s));
  put(static_cast<std::uint64_t>(ds.size()));
  put(ds.seed);
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    out.write(reinterpret_cast<const char*>(ds.features.col(i).data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(model.feature_dim())));
    put(ds.b[i]);
  }
  require(static_cast<bool>(out), ErrorCode::io, "write failed for '" + path + "'");
}

Dataset load_dataset_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::io, "cannot open '" + path + "'");
  auto get = [&](auto& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    require(static_cast<bool>(in), ErrorCode::io, "dataset: truncated binary file");
  };
  char magic[4];
  in.read(magic, 4);
  require(static_cast<bool>(in) && std::memcmp(magic, kMagic, 4) == 0, ErrorCode::io, "dataset: bad magic");
  std::uint32_t version = 0, kind = 0, nshape = 0;
  get(version);
  require(version == kVersion, ErrorCode::io, "dataset: unsupported version");
  get(kind);
  require(kind <= 3, ErrorCode::io, "dataset: bad model kind");
  get(nshape);
  require(nshape >= 1 && nshape <= 2, ErrorCode::io, "dataset: bad shape");
  Dataset ds;
  ds.kind = static_cast<ModelKind>(kind);
  for (std::uint32_t i = 0; i < nshape; ++i) {
    std::uint32_t s = 0;
    get(s);
    ds.shape.push_back(static_cast<int>(s));
  }
  std::uint64_t m = 0;
  get(m);
  get(ds.seed);
  const CompositeModel model = model_of(ds);
  ds.features.resize(model.feature_dim(), static_cast<Eigen::Index>(m));
  ds.b.resize(static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(m); ++i) {
    in.read(reinterpret_cast<char*>(ds.features.col(i).data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(model.feature_dim())));
    get(ds.b[i]);
  }
  return ds;
}

}  // namespace subdiff
