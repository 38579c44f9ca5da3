// Copyright 2026 The smartport Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Fixed-column MPS writer. Names are generated (C0000001, R0000001, S0001)
// so they always fit the 8-character fields; the layout is described in
// docs/formats.md.

#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "smartport/milp/problem.hpp"

namespace smartport::milp {

namespace detail {

inline std::string mps_name(char prefix, int index, int width) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%0*d", prefix, width, index + 1);
  return buf;
}

// Shortest-loss rendering that fits the 12-character value field.
inline std::string mps_number(double v) {
  char buf[32];
  for (int digits = 12; digits >= 1; --digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::string(buf).size() <= 12) return buf;
  }
  throw std::domain_error("value does not fit an MPS field");
}

// One data line: fields start at columns 2, 5, 15, 25, 40, 50.
inline void mps_line(std::ostream& os, const std::string& type, const std::string& n1,
                     const std::string& n2 = {}, const std::string& v1 = {},
                     const std::string& n3 = {}, const std::string& v2 = {}) {
  std::string line(61, ' ');
  auto put = [&](std::size_t col, const std::string& s) {
    if (line.size() < col - 1 + s.size()) line.resize(col - 1 + s.size(), ' ');
    line.replace(col - 1, s.size(), s);
  };
  put(2, type);
  put(5, n1);
  if (!n2.empty()) put(15, n2);
  if (!v1.empty()) put(25, v1);
  if (!n3.empty()) put(40, n3);
  if (!v2.empty()) put(50, v2);
  line.erase(line.find_last_not_of(' ') + 1);
  os << line << '\n';
}

}  // namespace detail

inline std::string mps_column_name(int j) { return detail::mps_name('C', j, 7); }
inline std::string mps_row_name(int i) { return detail::mps_name('R', i, 7); }

/// Writes `p` in fixed-column MPS with OBJSENSE MAX. The objective offset
/// is stored as the negated RHS of the objective row.
inline void write_mps(const MilpProblem& p, std::ostream& os,
                      const std::string& name = "SMARTPRT") {
  using detail::mps_line;
  using detail::mps_number;
  p.validate();
  os << "NAME          " << name.substr(0, 8) << '\n';
  os << "OBJSENSE\n    MAX\n";
  os << "ROWS\n";
  mps_line(os, "N", "OBJ");
  for (int i = 0; i < p.num_rows(); ++i) {
    const char* t = p.rows[i].relation == Relation::kLessEqual  ? "L"
                    : p.rows[i].relation == Relation::kEqual ? "E"
                                                             : "G";
    mps_line(os, t, mps_row_name(i));
  }

  // Column-major copy of the rows; duplicate terms are summed.
  std::vector<std::vector<std::pair<int, double>>> cols(p.num_variables());
  for (int i = 0; i < p.num_rows(); ++i) {
    for (const Term& t : p.rows[i].terms) {
      auto& c = cols[t.var];
      if (!c.empty() && c.back().first == i) {
        c.back().second += t.coef;
      } else {
        c.push_back({i, t.coef});
      }
    }
  }

  os << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (int j = 0; j < p.num_variables(); ++j) {
    const bool bin = p.variables[j].binary;
    if (bin != in_int) {
      const std::string m = detail::mps_name('M', marker++, 7);
      mps_line(os, "", m, "'MARKER'", "", bin ? "'INTORG'" : "'INTEND'");
      in_int = bin;
    }
    const std::string cn = mps_column_name(j);
    mps_line(os, "", cn, "OBJ", mps_number(p.variables[j].objective));
    for (const auto& [row, coef] : cols[j]) {
      if (coef != 0.0) mps_line(os, "", cn, mps_row_name(row), mps_number(coef));
    }
  }
  if (in_int) mps_line(os, "", detail::mps_name('M', marker, 7), "'MARKER'", "", "'INTEND'");

  os << "RHS\n";
  if (p.objective_offset != 0.0) mps_line(os, "", "RHS", "OBJ", mps_number(-p.objective_offset));
  for (int i = 0; i < p.num_rows(); ++i) {
    if (p.rows[i].rhs != 0.0) mps_line(os, "", "RHS", mps_row_name(i), mps_number(p.rows[i].rhs));
  }

  os << "BOUNDS\n";
  for (int j = 0; j < p.num_variables(); ++j) {
    const Variable& v = p.variables[j];
    const std::string cn = mps_column_name(j);
    if (v.binary && v.lower == 0.0 && v.upper == 1.0) {
      mps_line(os, "BV", "BND", cn);
      continue;
    }
    if (v.lower == v.upper) {
      mps_line(os, "FX", "BND", cn, mps_number(v.lower));
      continue;
    }
    if (v.lower == -kInfinity && v.upper == kInfinity) {
      mps_line(os, "FR", "BND", cn);
      continue;
    }
    if (v.lower == -kInfinity) {
      mps_line(os, "MI", "BND", cn);
    } else if (v.lower != 0.0) {
      mps_line(os, "LO", "BND", cn, mps_number(v.lower));
    }
    if (v.upper != kInfinity) mps_line(os, "UP", "BND", cn, mps_number(v.upper));
  }

  if (!p.sos2.empty()) {
    os << "SOS\n";
    for (int g = 0; g < static_cast<int>(p.sos2.size()); ++g) {
      mps_line(os, "S2", detail::mps_name('S', g, 4));
      const auto& m = p.sos2[g].members;
      for (int k = 0; k < static_cast<int>(m.size()); ++k) {
        mps_line(os, "", mps_column_name(m[k]), mps_number(p.sos2[g].reference_at(k)));
      }
    }
  }
  os << "ENDATA\n";
}

inline void write_mps(const MilpProblem& p, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_mps(p, os);
  if (!os) throw std::runtime_error("write failed for " + path);
}

}  // namespace smartport::milp
