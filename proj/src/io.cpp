#include "spca/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>

#include "spca/error.hpp"

namespace spca {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ModelInvalid: return "ModelInvalid";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::SolverFailed: return "SolverFailed";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open for reading: " + path.string());
  return in;
}

std::string format(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t end = line.find(',', start);
    if (end == std::string::npos) end = line.size();
    std::string cell = line.substr(start, end - start);
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    if (cell.empty()) return false;
    char* stop = nullptr;
    errno = 0;
    const double v = std::strtod(cell.c_str(), &stop);
    if (stop != cell.c_str() + cell.size() || errno == ERANGE) return false;
    out.push_back(v);
    start = end + 1;
  }
  return true;
}

}  // namespace

void write_matrix_csv(const fs::path& path, const Matrix& m, const std::vector<std::string>& header) {
  std::ofstream out = open_out(path);
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format(m(i, j));
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

Matrix read_matrix_csv(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::vector<double> row;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (!parse_row(line, row)) {
      if (first) {
        first = false;
        continue;
      }
      throw Error(ErrorCode::InvalidInput, "malformed CSV row in " + path.string() + ": " + line);
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(ErrorCode::InvalidInput, "ragged CSV in " + path.string());
    rows.push_back(row);
  }
  if (rows.empty()) throw Error(ErrorCode::InvalidInput, "no numeric rows in " + path.string());
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_sample_batch(const fs::path& path, const SampleBatch& batch) {
  std::vector<std::string> header;
  for (int j = 0; j < batch.p(); ++j) header.push_back("x" + std::to_string(j));
  write_matrix_csv(path, batch.data, header);
}

SampleBatch read_sample_batch(const fs::path& path) {
  SampleBatch b;
  b.data = read_matrix_csv(path);
  b.n = static_cast<int>(b.data.rows());
  return b;
}

BatchMetadata metadata_for(const SpikedModel& model, const SampleBatch& batch, const std::string& data_path) {
  BatchMetadata md;
  md.p = model.p();
  md.k = model.k();
  md.beta = model.beta();
  md.support = model.support();
  md.signs = model.signs();
  md.seed = batch.seed;
  md.stream = batch.stream;
  md.n = batch.n;
  if (model.gamma()) md.gamma = model.gamma()->matrix();
  md.data_path = data_path;
  return md;
}

SpikedModel model_from(const BatchMetadata& md) {
  std::optional<SymMatrix> gamma;
  if (md.gamma) gamma = SymMatrix(*md.gamma);
  return SpikedModel(md.p, md.k, md.beta, md.support, md.signs, std::move(gamma));
}

void write_metadata(const fs::path& path, const BatchMetadata& md) {
  json j;
  j["p"] = md.p;
  j["k"] = md.k;
  j["beta"] = md.beta;
  j["support"] = md.support;
  j["signs"] = md.signs;
  j["seed"] = md.seed;
  j["stream"] = md.stream;
  j["n"] = md.n;
  if (md.gamma) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < md.gamma->rows(); ++i) {
      std::vector<double> r(md.gamma->cols());
      for (Eigen::Index c = 0; c < md.gamma->cols(); ++c) r[c] = (*md.gamma)(i, c);
      rows.push_back(r);
    }
    j["base"] = "matrix";
    j["gamma"] = rows;
  } else {
    j["base"] = "identity";
  }
  j["data"] = md.data_path;
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

BatchMetadata read_metadata(const fs::path& path) {
  std::ifstream in = open_in(path);
  BatchMetadata md;
  try {
    const json j = json::parse(in);
    md.p = j.at("p").get<int>();
    md.k = j.at("k").get<int>();
    md.beta = j.at("beta").get<double>();
    md.support = j.at("support").get<std::vector<int>>();
    md.signs = j.at("signs").get<std::vector<int>>();
    md.seed = j.at("seed").get<std::uint64_t>();
    md.stream = j.value("stream", std::uint64_t{0});
    md.n = j.at("n").get<int>();
    md.data_path = j.at("data").get<std::string>();
    const std::string base = j.value("base", std::string("identity"));
    if (base == "matrix") {
      const auto rows = j.at("gamma").get<std::vector<std::vector<double>>>();
      Matrix g(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows.size()) throw Error(ErrorCode::InvalidInput, "gamma must be square");
        for (std::size_t c = 0; c < rows.size(); ++c) g(r, c) = rows[r][c];
      }
      md.gamma = g;
    } else if (base != "identity") {
      throw Error(ErrorCode::InvalidInput, "unknown base '" + base + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, "bad metadata " + path.string() + ": " + e.what());
  }
  return md;
}

}  // namespace spca
