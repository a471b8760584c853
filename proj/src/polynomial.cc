// Copyright 2026 The pgeo Authors
//
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

#include "pgeo/polynomial.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace pgeo {
namespace {

class Parser {
 public:
  Parser(std::string_view text, int num_vars)
      : text_(text), num_vars_(num_vars) {}

  [[noreturn]] void Fail(const std::string& what) const {
    throw std::invalid_argument("polynomial '" + std::string(text_) +
                                "': " + what + " at position " +
                                std::to_string(pos_));
  }

  void SkipSpace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool Done() {
    SkipSpace();
    return pos_ == text_.size();
  }

  bool Accept(char c) {
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double Number() {
    SkipSpace();
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const auto [end, ec] =
        std::from_chars(begin, text_.data() + text_.size(), value);
    if (ec != std::errc() || end == begin) Fail("expected a number");
    pos_ += static_cast<size_t>(end - begin);
    return value;
  }

  int Unsigned() {
    SkipSpace();
    int value = 0;
    const char* begin = text_.data() + pos_;
    const auto [end, ec] =
        std::from_chars(begin, text_.data() + text_.size(), value);
    if (ec != std::errc() || end == begin || value < 0) {
      Fail("expected a non-negative integer");
    }
    pos_ += static_cast<size_t>(end - begin);
    return value;
  }

  // Index into the exponent vector: 0..n-1 for x1..xn, n for t.
  int Variable() {
    SkipSpace();
    if (Accept('t')) return num_vars_;
    if (!Accept('x')) Fail("expected a number or variable");
    const size_t at = pos_;
    const int k = Unsigned();
    if (k < 1 || k > num_vars_) {
      pos_ = at;
      Fail("variable index outside 1.." + std::to_string(num_vars_));
    }
    return k - 1;
  }

  // factor {'*' factor}
  void Term(double sign, std::vector<int>& exponents, double& coefficient) {
    coefficient = sign;
    exponents.assign(num_vars_ + 1, 0);
    do {
      SkipSpace();
      if (pos_ >= text_.size()) Fail("unexpected end");
      const char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        coefficient *= Number();
      } else {
        const int var = Variable();
        exponents[var] += Accept('^') ? Unsigned() : 1;
      }
    } while (Accept('*'));
  }

 private:
  std::string_view text_;
  int num_vars_;
  size_t pos_ = 0;
};

}  // namespace

Polynomial Polynomial::Parse(std::string_view text, int num_vars) {
  if (num_vars < 1) throw std::invalid_argument("polynomial needs >= 1 variable");
  Parser parser(text, num_vars);
  Polynomial out;
  out.num_vars_ = num_vars;
  if (parser.Done()) parser.Fail("empty expression");
  double sign = parser.Accept('-') ? -1.0 : 1.0;
  if (sign > 0.0) parser.Accept('+');
  while (true) {
    Term term;
    parser.Term(sign, term.exponents, term.coefficient);
    out.terms_.push_back(std::move(term));
    if (parser.Done()) break;
    if (parser.Accept('+')) {
      sign = 1.0;
    } else if (parser.Accept('-')) {
      sign = -1.0;
    } else {
      parser.Fail("expected '+', '-' or '*'");
    }
  }
  return out;
}

double Polynomial::EvaluateTerm(const Term& term, double t, const Point& x,
                                int differentiate) const {
  double value = term.coefficient;
  for (int v = 0; v <= num_vars_; ++v) {
    int e = term.exponents[v];
    if (v == differentiate) {
      if (e == 0) return 0.0;
      value *= e;
      --e;
    }
    if (e > 0) value *= std::pow(v == num_vars_ ? t : x[v], e);
  }
  return value;
}

double Polynomial::Evaluate(double t, const Point& x) const {
  if (x.size() != num_vars_) {
    throw std::invalid_argument("polynomial evaluated at a point of wrong size");
  }
  double sum = 0.0;
  for (const Term& term : terms_) sum += EvaluateTerm(term, t, x, -1);
  return sum;
}

double Polynomial::Derivative(int var, double t, const Point& x) const {
  if (var < 0 || var >= num_vars_) {
    throw std::out_of_range("derivative variable out of range");
  }
  if (x.size() != num_vars_) {
    throw std::invalid_argument("polynomial evaluated at a point of wrong size");
  }
  double sum = 0.0;
  for (const Term& term : terms_) sum += EvaluateTerm(term, t, x, var);
  return sum;
}

PolynomialMatrix::PolynomialMatrix(int rows, int cols,
                                   std::vector<Polynomial> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows < 1 || cols < 1 ||
      entries_.size() != static_cast<size_t>(rows) * cols) {
    throw std::invalid_argument("polynomial table needs rows*cols entries");
  }
}

PolynomialMatrix PolynomialMatrix::Parse(const std::vector<std::string>& entries,
                                         int rows, int cols, int num_vars) {
  if (entries.size() != static_cast<size_t>(rows) * cols) {
    throw std::invalid_argument(
        "expected " + std::to_string(rows * cols) + " entries, got " +
        std::to_string(entries.size()));
  }
  std::vector<Polynomial> parsed;
  parsed.reserve(entries.size());
  for (const auto& e : entries) parsed.push_back(Polynomial::Parse(e, num_vars));
  return PolynomialMatrix(rows, cols, std::move(parsed));
}

Eigen::MatrixXd PolynomialMatrix::Evaluate(double t, const Point& x) const {
  Eigen::MatrixXd out(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      out(r, c) = entries_[static_cast<size_t>(r) * cols_ + c].Evaluate(t, x);
    }
  }
  return out;
}

DriftField PolynomialDrift(std::vector<Polynomial> components) {
  if (components.empty()) throw std::invalid_argument("drift needs components");
  const int n = static_cast<int>(components.size());
  for (const auto& c : components) {
    if (c.num_vars() != n) {
      throw std::invalid_argument("drift components must use x1..x" +
                                  std::to_string(n));
    }
  }
  auto eval = [components](double t, const Point& p) {
    Tangent v(static_cast<Eigen::Index>(components.size()));
    for (size_t i = 0; i < components.size(); ++i) {
      v[static_cast<Eigen::Index>(i)] = components[i].Evaluate(t, p);
    }
    return v;
  };
  auto jacobian = [components, n](double t, const Point& p) {
    Eigen::MatrixXd j(n, n);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) j(i, k) = components[i].Derivative(k, t, p);
    }
    return j;
  };
  return DriftField(n, eval, jacobian);
}

SubRiemannianStructure PolynomialStructure(
    std::string name, PolynomialMatrix frame,
    std::optional<PolynomialMatrix> metric) {
  const int n = frame.rows();
  if (metric.has_value() && (metric->rows() != n || metric->cols() != n)) {
    throw std::invalid_argument("metric table must be n x n");
  }
  SubRiemannianStructure::MetricField metric_field;
  if (metric.has_value()) {
    metric_field = [m = *metric](const Point& p) { return m.Evaluate(0.0, p); };
  } else {
    metric_field = [n](const Point&) {
      return Eigen::MatrixXd::Identity(n, n);
    };
  }
  return SubRiemannianStructure(
      std::move(name), n, frame.cols(), metric_field,
      [frame](const Point& p) { return frame.Evaluate(0.0, p); });
}

}  // namespace pgeo
