#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "drro/common.hpp"
#include "drro/sysmodel.hpp"

namespace drro {

/// Ordered list of named dense matrices. Text form, one block per matrix:
///
///   # comment
///   A 2 2
///   0.5 1.0
///   0.0 0.9
///
/// i.e. a header `<name> <rows> <cols>` followed by rows*cols values in
/// row-major order. Whitespace and line breaks between values are free.
using NamedMatrices = std::vector<std::pair<std::string, Matrix>>;

NamedMatrices ReadNamedMatrices(std::istream& in);
void WriteNamedMatrices(std::ostream& out, const NamedMatrices& matrices);

const Matrix* FindMatrix(const NamedMatrices& matrices, const std::string& name);

/// Reads A, Bu, Bw, C (and an optional control weight R, folded into Bu).
/// Validates shapes and the structural rank tests; failures name the test.
StateSpaceModel LoadModel(const std::filesystem::path& path);
StateSpaceModel ParseModel(std::istream& in);
void SaveModel(const std::filesystem::path& path, const StateSpaceModel& model);

}  // namespace drro
