#include "drro/model_io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace drro {
namespace {

// Strips '#' comments before tokenizing.
std::istringstream StripComments(std::istream& in) {
  std::string line, text;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    text += line;
    text += '\n';
  }
  return std::istringstream(text);
}

}  // namespace

NamedMatrices ReadNamedMatrices(std::istream& in) {
  std::istringstream tokens = StripComments(in);
  NamedMatrices out;
  std::string name;
  while (tokens >> name) {
    long rows = -1, cols = -1;
    if (!(tokens >> rows >> cols) || rows < 0 || cols < 0) {
      Throw(ErrorCode::kIo, "bad dimensions for matrix '" + name + "'");
    }
    Matrix M(rows, cols);
    for (long i = 0; i < rows; ++i) {
      for (long j = 0; j < cols; ++j) {
        if (!(tokens >> M(i, j))) {
          Throw(ErrorCode::kIo, "matrix '" + name + "' expects " + std::to_string(rows * cols) +
                                    " values");
        }
      }
    }
    if (FindMatrix(out, name) != nullptr) {
      Throw(ErrorCode::kIo, "duplicate matrix '" + name + "'");
    }
    out.emplace_back(name, std::move(M));
  }
  return out;
}

void WriteNamedMatrices(std::ostream& out, const NamedMatrices& matrices) {
  out << std::setprecision(17);
  for (const auto& [name, M] : matrices) {
    out << name << ' ' << M.rows() << ' ' << M.cols() << '\n';
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      for (Eigen::Index j = 0; j < M.cols(); ++j) {
        out << (j == 0 ? "" : " ") << M(i, j);
      }
      out << '\n';
    }
  }
}

const Matrix* FindMatrix(const NamedMatrices& matrices, const std::string& name) {
  for (const auto& [n, M] : matrices) {
    if (n == name) return &M;
  }
  return nullptr;
}

StateSpaceModel ParseModel(std::istream& in) {
  const NamedMatrices named = ReadNamedMatrices(in);
  auto get = [&](const char* name) -> const Matrix& {
    const Matrix* M = FindMatrix(named, name);
    if (M == nullptr) Throw(ErrorCode::kIo, std::string("model is missing matrix '") + name + "'");
    return *M;
  };
  StateSpaceModel model = StateSpaceModel::Create(get("A"), get("Bu"), get("Bw"), get("C"));
  if (const Matrix* R = FindMatrix(named, "R")) model = FoldControlWeight(model, *R);
  RequireAssumptions(model);
  return model;
}

StateSpaceModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Throw(ErrorCode::kIo, "cannot open model file " + path.string());
  return ParseModel(in);
}

void SaveModel(const std::filesystem::path& path, const StateSpaceModel& model) {
  std::ofstream out(path);
  if (!out) Throw(ErrorCode::kIo, "cannot write " + path.string());
  WriteNamedMatrices(out, {{"A", model.A}, {"Bu", model.Bu}, {"Bw", model.Bw}, {"C", model.C}});
}

}  // namespace drro
