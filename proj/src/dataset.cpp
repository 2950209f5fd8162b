#include "covsig/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace covsig {

namespace {

Index count_continuous(const std::vector<ColumnKind>& kinds)
{
  return std::count(kinds.begin(), kinds.end(), ColumnKind::continuous);
}

std::vector<std::string> default_names(const std::string& prefix, Index count)
{
  std::vector<std::string> names;
  for (Index j = 0; j < count; ++j) {
    names.push_back(prefix + std::to_string(j + 1));
  }
  return names;
}

std::vector<std::string> split_line(const std::string& line)
{
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    auto first = field.find_first_not_of(" \t\r");
    auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos
                       ? std::string()
                       : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

std::string format_double(double v)
{
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

} // namespace

Index Dataset::p_continuous() const
{
  return count_continuous(w_kinds);
}

Index Dataset::q_continuous() const
{
  return count_continuous(x_kinds);
}

void Dataset::validate(Index min_n) const
{
  const Index rows = n();
  if (rows < min_n) {
    throw InvalidInput("dataset has " + std::to_string(rows) +
                       " observations, at least " + std::to_string(min_n) +
                       " are required");
  }
  if (w.rows() != rows || x.rows() != rows) {
    throw InvalidInput("covariate matrices and response differ in length");
  }
  if (static_cast<Index>(w_kinds.size()) != w.cols() ||
      static_cast<Index>(x_kinds.size()) != x.cols()) {
    throw InvalidInput("column kinds do not match column counts");
  }
  if (!y.allFinite() || !w.allFinite() || !x.allFinite()) {
    throw InvalidInput("dataset contains NaN or infinite values");
  }
}

Dataset make_dataset(Vector<double> y, Matrix<double> w, Matrix<double> x,
                     std::vector<ColumnKind> w_kinds,
                     std::vector<ColumnKind> x_kinds)
{
  Dataset d;
  if (w_kinds.empty()) {
    w_kinds.assign(w.cols(), ColumnKind::continuous);
  }
  if (x_kinds.empty()) {
    x_kinds.assign(x.cols(), ColumnKind::continuous);
  }
  d.w_names = default_names("w", w.cols());
  d.x_names = default_names("x", x.cols());
  d.y = std::move(y);
  d.w = std::move(w);
  d.x = std::move(x);
  d.w_kinds = std::move(w_kinds);
  d.x_kinds = std::move(x_kinds);
  d.validate();
  return d;
}

namespace {

void scale_columns(Matrix<double>& m, const std::vector<ColumnKind>& kinds,
                   const std::vector<std::string>& names,
                   Vector<double>& scales)
{
  const Index n = m.rows();
  scales = Vector<double>::Ones(m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    if (kinds[j] == ColumnKind::discrete) {
      continue;
    }
    const double mean = m.col(j).mean();
    const double ss = (m.col(j).array() - mean).square().sum();
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    if (!(sd > 0.0)) {
      const std::string name =
        j < static_cast<Index>(names.size()) ? names[j] : "#" + std::to_string(j + 1);
      throw InvalidInput("continuous column '" + name +
                         "' has zero variance; mark it discrete or remove it");
    }
    m.col(j) /= sd;
    scales(j) = sd;
  }
}

} // namespace

ScaledDataset standardize(const Dataset& d)
{
  d.validate();
  ScaledDataset out{d, {}, {}};
  scale_columns(out.data.w, d.w_kinds, d.w_names, out.w_scales);
  scale_columns(out.data.x, d.x_kinds, d.x_names, out.x_scales);
  return out;
}

Dataset load_dataset(const std::filesystem::path& path, const Schema& schema)
{
  std::ifstream in(path);
  if (!in) {
    throw InvalidInput("cannot open data file '" + path.string() + "'");
  }

  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidInput("data file '" + path.string() + "' is empty");
  }
  const auto header = split_line(line);
  std::map<std::string, std::size_t> column_of;
  for (std::size_t j = 0; j < header.size(); ++j) {
    column_of[header[j]] = j;
  }

  auto lookup = [&](const std::string& name) {
    auto it = column_of.find(name);
    if (it == column_of.end()) {
      throw InvalidInput("missing column '" + name + "' in " + path.string());
    }
    return it->second;
  };

  std::vector<std::string> all_roles{schema.y};
  all_roles.insert(all_roles.end(), schema.w.begin(), schema.w.end());
  all_roles.insert(all_roles.end(), schema.x.begin(), schema.x.end());
  {
    auto sorted = all_roles;
    std::sort(sorted.begin(), sorted.end());
    auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end()) {
      throw InvalidInput("column '" + *dup + "' is assigned more than one role");
    }
  }
  for (const auto& name : schema.discrete) {
    if (std::find(all_roles.begin() + 1, all_roles.end(), name) == all_roles.end()) {
      throw InvalidInput("discrete column '" + name + "' is not a W or X column");
    }
  }

  std::vector<std::size_t> source;
  for (const auto& name : all_roles) {
    source.push_back(lookup(name));
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const auto fields = split_line(line);
    if (fields.size() != header.size()) {
      throw InvalidInput("row " + std::to_string(line_no) + " has " +
                         std::to_string(fields.size()) + " fields, expected " +
                         std::to_string(header.size()));
    }
    std::vector<double> values;
    for (std::size_t r = 0; r < source.size(); ++r) {
      const std::string& cell = fields[source[r]];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
        throw InvalidInput("non-numeric cell at row " + std::to_string(line_no) +
                           ", column '" + all_roles[r] + "': '" + cell + "'");
      }
      if (!std::isfinite(v)) {
        throw InvalidInput("non-finite cell at row " + std::to_string(line_no) +
                           ", column '" + all_roles[r] + "': '" + cell + "'");
      }
      values.push_back(v);
    }
    rows.push_back(std::move(values));
  }

  const Index n = static_cast<Index>(rows.size());
  const Index p = static_cast<Index>(schema.w.size());
  const Index q = static_cast<Index>(schema.x.size());
  Dataset d;
  d.y.resize(n);
  d.w.resize(n, p);
  d.x.resize(n, q);
  for (Index i = 0; i < n; ++i) {
    d.y(i) = rows[i][0];
    for (Index j = 0; j < p; ++j) {
      d.w(i, j) = rows[i][1 + j];
    }
    for (Index j = 0; j < q; ++j) {
      d.x(i, j) = rows[i][1 + p + j];
    }
  }
  auto kind_of = [&](const std::string& name) {
    return std::find(schema.discrete.begin(), schema.discrete.end(), name) !=
               schema.discrete.end()
             ? ColumnKind::discrete
             : ColumnKind::continuous;
  };
  for (const auto& name : schema.w) {
    d.w_kinds.push_back(kind_of(name));
  }
  for (const auto& name : schema.x) {
    d.x_kinds.push_back(kind_of(name));
  }
  d.y_name = schema.y;
  d.w_names = schema.w;
  d.x_names = schema.x;
  d.validate();
  return d;
}

void save_dataset(const std::filesystem::path& path, const Dataset& d)
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  out << d.y_name;
  for (const auto& name : d.w_names) {
    out << ',' << name;
  }
  for (const auto& name : d.x_names) {
    out << ',' << name;
  }
  out << '\n';
  for (Index i = 0; i < d.n(); ++i) {
    out << format_double(d.y(i));
    for (Index j = 0; j < d.p(); ++j) {
      out << ',' << format_double(d.w(i, j));
    }
    for (Index j = 0; j < d.q(); ++j) {
      out << ',' << format_double(d.x(i, j));
    }
    out << '\n';
  }
}

Schema schema_of(const Dataset& d)
{
  Schema s{d.y_name, d.w_names, d.x_names, {}};
  for (Index j = 0; j < d.p(); ++j) {
    if (d.w_kinds[j] == ColumnKind::discrete) {
      s.discrete.push_back(d.w_names[j]);
    }
  }
  for (Index j = 0; j < d.q(); ++j) {
    if (d.x_kinds[j] == ColumnKind::discrete) {
      s.discrete.push_back(d.x_names[j]);
    }
  }
  return s;
}

} // namespace covsig
