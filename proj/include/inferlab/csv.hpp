#pragma once

// Plain CSV: comma separated, '.' decimal, lines starting with '#' are
// comments, first non-comment line is the header. Numbers are written with
// 17 significant digits.

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "inferlab/bayes.hpp"
#include "inferlab/clt.hpp"
#include "inferlab/ensemble.hpp"
#include "inferlab/error.hpp"
#include "inferlab/regression.hpp"

namespace inferlab::csv {

inline std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  const std::vector<double>* find(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return &columns[i];
    return nullptr;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_number(const std::string& cell, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size())
    throw ParameterError("csv line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
  return v;
}

}  // namespace detail

inline Table read(std::istream& in) {
  Table t;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = detail::trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto cells = detail::split(s);
    if (!have_header) {
      t.header = std::move(cells);
      t.columns.resize(t.header.size());
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size())
      throw ParameterError("csv line " + std::to_string(line_no) + ": expected " +
                           std::to_string(t.header.size()) + " fields");
    for (std::size_t i = 0; i < cells.size(); ++i) t.columns[i].push_back(detail::parse_number(cells[i], line_no));
  }
  if (!have_header) throw ParameterError("csv: missing header");
  return t;
}

inline Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path);
  return read(in);
}

/// Columns x, y and optionally sigma.
inline Dataset to_dataset(const Table& t) {
  const auto* x = t.find("x");
  const auto* y = t.find("y");
  if (!x || !y) throw ParameterError("csv: dataset needs x and y columns");
  Dataset ds{*x, *y, std::nullopt};
  if (const auto* s = t.find("sigma")) ds.sigmas = *s;
  ds.validate();
  return ds;
}

inline void write_row(std::ostream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << format(v);
    first = false;
  }
  out << '\n';
}

inline void write_dataset(std::ostream& out, const Dataset& ds) {
  out << (ds.sigmas ? "x,y,sigma\n" : "x,y\n");
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << format(ds.xs[i]) << ',' << format(ds.ys[i]);
    if (ds.sigmas) out << ',' << format((*ds.sigmas)[i]);
    out << '\n';
  }
}

inline void write_values(std::ostream& out, const std::string& name, std::span<const double> values) {
  out << name << '\n';
  for (double v : values) out << format(v) << '\n';
}

inline void write_histogram(std::ostream& out, std::span<const HistogramBin> bins) {
  out << "lo,hi,center,count\n";
  for (const auto& b : bins)
    out << format(b.lo) << ',' << format(b.hi) << ',' << format(b.center()) << ',' << b.count << '\n';
}

inline void write_curve(std::ostream& out, const ScalingCurve& c) {
  out << "# loglog_slope=" << format(c.loglog_slope) << " loglog_intercept=" << format(c.loglog_intercept) << '\n';
  out << "n,std\n";
  for (std::size_t i = 0; i < c.ns.size(); ++i) out << c.ns[i] << ',' << format(c.stds[i]) << '\n';
}

inline void write_grid(std::ostream& out, const PosteriorGrid1D& g, const std::string& axis = "theta") {
  out << "# axis=" << axis << " points=" << g.coords.size() << '\n';
  out << axis << ",density\n";
  for (std::size_t i = 0; i < g.coords.size(); ++i) out << format(g.coords[i]) << ',' << format(g.density[i]) << '\n';
}

/// Long form, x-major.
inline void write_grid(std::ostream& out, const PosteriorGrid2D& g, const std::string& x_axis = "x",
                       const std::string& y_axis = "y") {
  out << "# axes=" << x_axis << ',' << y_axis << " nx=" << g.nx() << " ny=" << g.ny() << '\n';
  out << x_axis << ',' << y_axis << ",density\n";
  for (std::size_t ix = 0; ix < g.nx(); ++ix)
    for (std::size_t iy = 0; iy < g.ny(); ++iy)
      out << format(g.coords_x[ix]) << ',' << format(g.coords_y[iy]) << ',' << format(g.at(ix, iy)) << '\n';
}

inline void write_dim_header(std::ostream& out, std::size_t dim, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < dim; ++i) {
    if (i) out << ',';
    out << (i < names.size() ? names[i] : "dim" + std::to_string(i));
  }
}

/// walker,step,dim0..dimK,logp
inline void write_chain(std::ostream& out, const EnsembleChain& chain) {
  out << "walker,step,";
  write_dim_header(out, chain.dim, {});
  out << ",logp\n";
  for (std::size_t k = 0; k < chain.nwalkers; ++k)
    for (std::size_t s = 0; s < chain.nsteps; ++s) {
      out << k << ',' << s;
      for (double v : chain.at(k, s)) out << ',' << format(v);
      out << ',' << format(chain.log_prob[k * chain.nsteps + s]) << '\n';
    }
}

inline void write_flat(std::ostream& out, const FlatSamples& fs, const std::vector<std::string>& names = {}) {
  write_dim_header(out, fs.dim, names);
  out << '\n';
  for (std::size_t r = 0; r < fs.rows(); ++r) {
    const auto row = fs.row(r);
    for (std::size_t i = 0; i < fs.dim; ++i) {
      if (i) out << ',';
      out << format(row[i]);
    }
    out << '\n';
  }
}

}  // namespace inferlab::csv
