// Copyright 2026 The vexplore Authors.
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

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "vexplore/error.hpp"
#include "vexplore/stats.hpp"

namespace vexplore {
namespace {

// One feature column over the labeled members; nullopt entries are missing.
struct Column {
  std::string name;
  std::vector<std::optional<double>> values;
  bool standardize = true;
};

void orient(Eigen::VectorXd& v) {
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

std::optional<std::string> default_label_dimension(const Dataset& dataset) {
  for (const auto& a : dataset.schema().demographics.attributes()) {
    if (!a.numeric()) return a.name;
  }
  return std::nullopt;
}

Projection lda_project(const Dataset& dataset, const MemberSet& members,
                       const std::string& label_dimension, const LdaOptions& options) {
  const auto& schema = dataset.schema().demographics;
  const auto label_pos = schema.find(label_dimension);
  if (!label_pos) {
    throw Error(ErrorCode::kUnknownDimension,
                fmt::format("unknown label dimension '{}'", label_dimension),
                {{"dimension", label_dimension}});
  }
  if (schema.attributes()[*label_pos].numeric()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("label dimension '{}' must be categorical", label_dimension),
                {{"dimension", label_dimension}});
  }

  Projection out;
  out.label_dimension = label_dimension;
  std::vector<UserIndex> users;
  std::vector<std::string> labels;
  for (UserIndex u : members) {
    const auto& demo = dataset.demographics(u);
    auto it = demo.find(label_dimension);
    if (it == demo.end()) {
      out.excluded.push_back(dataset.user_id(u));
      continue;
    }
    users.push_back(u);
    labels.push_back(std::get<std::string>(it->second));
  }
  std::vector<std::string> classes = labels;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2 || users.size() < 3) {
    throw Error(ErrorCode::kInsufficientClasses,
                fmt::format("projection needs >= 2 classes and >= 3 labeled members, got {} and {}",
                            classes.size(), users.size()),
                {{"classes", std::to_string(classes.size())},
                 {"labeled", std::to_string(users.size())}});
  }
  const std::size_t n = users.size();

  std::vector<Column> columns;
  for (const auto& a : schema.attributes()) {
    if (a.name == label_dimension) continue;
    if (a.numeric()) {
      Column c{a.name, {}, true};
      for (UserIndex u : users) {
        const auto& demo = dataset.demographics(u);
        auto it = demo.find(a.name);
        c.values.push_back(it == demo.end() ? std::nullopt
                                            : std::optional<double>(std::get<double>(it->second)));
      }
      columns.push_back(std::move(c));
    } else {
      std::vector<std::string> values;
      for (UserIndex u : users) {
        const auto& demo = dataset.demographics(u);
        if (auto it = demo.find(a.name); it != demo.end()) {
          values.push_back(std::get<std::string>(it->second));
        }
      }
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      for (const auto& v : values) {
        Column c{a.name + "=" + v, {}, false};
        for (UserIndex u : users) {
          const auto& demo = dataset.demographics(u);
          auto it = demo.find(a.name);
          c.values.push_back(it != demo.end() && std::get<std::string>(it->second) == v ? 1.0 : 0.0);
        }
        columns.push_back(std::move(c));
      }
    }
  }
  {
    Column count{std::string(kActionCountDimension), {}, true};
    Column mean{std::string(kMeanValueDimension), {}, true};
    for (UserIndex u : users) {
      count.values.push_back(static_cast<double>(dataset.action_count(u)));
      mean.values.push_back(dataset.mean_value(u));
    }
    columns.push_back(std::move(count));
    columns.push_back(std::move(mean));
  }

  // Standardize, impute, and drop constant columns.
  std::vector<std::vector<double>> kept;
  for (auto& c : columns) {
    double sum = 0.0;
    std::size_t present = 0;
    for (const auto& v : c.values) {
      if (v) {
        sum += *v;
        ++present;
      }
    }
    if (present == 0) continue;
    const double mu = sum / static_cast<double>(present);
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = c.values[i] ? *c.values[i] : mu;
    double var = 0.0;
    for (double x : col) var += (x - mu) * (x - mu);
    var /= static_cast<double>(n);
    if (!(var > 1e-24)) continue;
    if (c.standardize) {
      const double sd = std::sqrt(var);
      for (double& x : col) x = (x - mu) / sd;
    }
    out.features.push_back(c.name);
    kept.push_back(std::move(col));
  }
  if (kept.empty()) {
    throw Error(ErrorCode::kDegenerateFeatures, "every member feature is constant");
  }
  const auto p = static_cast<Eigen::Index>(kept.size());

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i), j) = kept[j][i];
  }
  std::vector<std::size_t> class_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    class_of[i] = static_cast<std::size_t>(
        std::lower_bound(classes.begin(), classes.end(), labels[i]) - classes.begin());
  }

  const Eigen::RowVectorXd mean_all = x.colwise().mean();
  Eigen::MatrixXd class_means = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(classes.size()), p);
  std::vector<double> class_sizes(classes.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    class_means.row(static_cast<Eigen::Index>(class_of[i])) += x.row(static_cast<Eigen::Index>(i));
    class_sizes[class_of[i]] += 1.0;
  }
  for (std::size_t c = 0; c < classes.size(); ++c) {
    class_means.row(static_cast<Eigen::Index>(c)) /= class_sizes[c];
  }

  Eigen::MatrixXd residual(static_cast<Eigen::Index>(n), p);
  for (std::size_t i = 0; i < n; ++i) {
    residual.row(static_cast<Eigen::Index>(i)) =
        x.row(static_cast<Eigen::Index>(i)) - class_means.row(static_cast<Eigen::Index>(class_of[i]));
  }
  const Eigen::MatrixXd within = residual.transpose() * residual;
  Eigen::MatrixXd between = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const Eigen::RowVectorXd d = class_means.row(static_cast<Eigen::Index>(c)) - mean_all;
    between += class_sizes[c] * d.transpose() * d;
  }
  const Eigen::MatrixXd regularized =
      within + options.ridge * Eigen::MatrixXd::Identity(p, p);

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(between, regularized);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kDegenerateFeatures, "discriminant eigenproblem did not converge");
  }
  // Eigenvalues ascend.
  Eigen::VectorXd axis1 = solver.eigenvectors().col(p - 1);
  Eigen::VectorXd axis2 = Eigen::VectorXd::Zero(p);
  if (p >= 2) {
    if (classes.size() == 2) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pca(within);
      axis2 = pca.eigenvectors().col(p - 1);
    } else {
      axis2 = solver.eigenvectors().col(p - 2);
    }
  }
  orient(axis1);
  orient(axis2);

  out.axis1.assign(axis1.data(), axis1.data() + p);
  out.axis2.assign(axis2.data(), axis2.data() + p);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::RowVectorXd centered = x.row(static_cast<Eigen::Index>(i)) - mean_all;
    out.points.push_back(
        {dataset.user_id(users[i]), centered.dot(axis1), centered.dot(axis2), labels[i]});
  }
  return out;
}

}  // namespace vexplore
