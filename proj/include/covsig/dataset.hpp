#pragma once

#include "covsig/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace covsig {

enum class ColumnKind { continuous, discrete };

//! Response y, null-hypothesis covariates w (n x p) and covariates under
//! test x (n x q). Discrete columns compare by exact equality only.
struct Dataset
{
  Vector<double> y;
  Matrix<double> w;
  Matrix<double> x;
  std::vector<ColumnKind> w_kinds;
  std::vector<ColumnKind> x_kinds;
  std::string y_name = "y";
  std::vector<std::string> w_names;
  std::vector<std::string> x_names;

  Index n() const { return y.size(); }
  Index p() const { return w.cols(); }
  Index q() const { return x.cols(); }

  //! Number of continuous columns of w (the smoothing dimension).
  Index p_continuous() const;
  Index q_continuous() const;

  //! Throws InvalidInput on inconsistent shapes, non-finite cells, or n < min_n.
  void validate(Index min_n = 1) const;
};

//! Builds a dataset with all-continuous columns; convenient for tests and
//! the simulation module.
Dataset make_dataset(Vector<double> y, Matrix<double> w, Matrix<double> x,
                     std::vector<ColumnKind> w_kinds = {},
                     std::vector<ColumnKind> x_kinds = {});

//! Standardized copy of a dataset: continuous covariate columns divided by
//! their sample standard deviation (n-1 denominator). y is left as is.
struct ScaledDataset
{
  Dataset data;
  Vector<double> w_scales;
  Vector<double> x_scales;
};

ScaledDataset standardize(const Dataset& d);

//! Column role assignment for file ingestion.
struct Schema
{
  std::string y;
  std::vector<std::string> w;
  std::vector<std::string> x;
  //! Names of columns (in w or x) to be treated as discrete.
  std::vector<std::string> discrete;
};

//! Reads a comma-separated table with a header row.
Dataset load_dataset(const std::filesystem::path& path, const Schema& schema);

//! Writes y, w and x columns with their names; values use the shortest
//! representation that round-trips exactly.
void save_dataset(const std::filesystem::path& path, const Dataset& d);

//! Schema that reproduces the column layout written by save_dataset.
Schema schema_of(const Dataset& d);

} // namespace covsig
