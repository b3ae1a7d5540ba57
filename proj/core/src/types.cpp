#include "ftl/types.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace ftl {
namespace {

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0,1], got " +
                                std::to_string(x));
  }
}

template <typename Atoms>
void check_weights(const Atoms& atoms) {
  if (atoms.empty()) throw std::invalid_argument("distribution has no atoms");
  double total = 0.0;
  for (const auto& atom : atoms) {
    if (!(atom.weight > 0.0) || !std::isfinite(atom.weight)) {
      throw std::invalid_argument("atom weights must be strictly positive");
    }
    total += atom.weight;
  }
  if (std::abs(total - 1.0) > kWeightTolerance) {
    throw std::invalid_argument("atom weights sum to " + std::to_string(total) +
                                ", expected 1");
  }
}

}  // namespace

FiniteMarginal::FiniteMarginal(std::vector<MarginalAtom> atoms) : atoms_(std::move(atoms)) {
  check_weights(atoms_);
  std::vector<double> values;
  values.reserve(atoms_.size());
  for (const auto& atom : atoms_) {
    check_unit(atom.value, "marginal support value");
    values.push_back(atom.value);
  }
  std::sort(values.begin(), values.end());
  if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
    throw std::invalid_argument("marginal support values must be distinct");
  }
}

double FiniteMarginal::cdf(double x) const {
  double mass = 0.0;
  for (const auto& atom : atoms_) {
    if (atom.value <= x) mass += atom.weight;
  }
  return mass;
}

double FiniteMarginal::survival(double x) const {
  double mass = 0.0;
  for (const auto& atom : atoms_) {
    if (x <= atom.value) mass += atom.weight;
  }
  return mass;
}

FiniteJointDistribution::FiniteJointDistribution(std::vector<JointAtom> atoms)
    : atoms_(std::move(atoms)) {
  check_weights(atoms_);
  std::vector<ValuationPair> pairs;
  pairs.reserve(atoms_.size());
  for (const auto& atom : atoms_) {
    check_unit(atom.pair.seller, "seller valuation");
    check_unit(atom.pair.buyer, "buyer valuation");
    pairs.push_back(atom.pair);
  }
  std::sort(pairs.begin(), pairs.end());
  if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) {
    throw std::invalid_argument("joint atoms must be pairwise distinct");
  }
}

FiniteJointDistribution FiniteJointDistribution::product(const FiniteMarginal& seller,
                                                         const FiniteMarginal& buyer) {
  std::vector<JointAtom> atoms;
  atoms.reserve(seller.size() * buyer.size());
  for (const auto& s : seller.atoms()) {
    for (const auto& b : buyer.atoms()) {
      atoms.push_back({{s.value, b.value}, s.weight * b.weight});
    }
  }
  return FiniteJointDistribution(std::move(atoms));
}

FiniteJointDistribution FiniteJointDistribution::empirical(
    std::span<const ValuationPair> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical distribution of no samples");
  std::map<ValuationPair, std::size_t> slot;
  std::vector<JointAtom> atoms;
  for (const auto& pair : samples) {
    auto [it, inserted] = slot.try_emplace(pair, atoms.size());
    if (inserted) atoms.push_back({pair, 0.0});
    atoms[it->second].weight += 1.0;
  }
  const double n = static_cast<double>(samples.size());
  for (auto& atom : atoms) atom.weight /= n;
  return FiniteJointDistribution(std::move(atoms));
}

BreakpointSet::BreakpointSet(std::vector<double> points) : points_(std::move(points)) {
  for (double p : points_) check_unit(p, "breakpoint");
  points_.push_back(0.0);
  points_.push_back(1.0);
  std::sort(points_.begin(), points_.end());
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
}

bool BreakpointSet::contains(double p) const {
  return std::binary_search(points_.begin(), points_.end(), p);
}

}  // namespace ftl
