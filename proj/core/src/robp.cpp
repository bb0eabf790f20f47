#include "streamdist/robp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "streamdist/errors.hpp"
#include "streamdist/gf2.hpp"
#include "streamdist/parallel.hpp"

namespace streamdist {

// ---- structure ----

Robp::Robp(std::uint64_t alphabet_size, std::vector<std::vector<Vertex>> layers)
    : alphabet_(alphabet_size), layers_(std::move(layers)) {
  if (alphabet_ == 0) throw std::invalid_argument("Robp: alphabet must be nonempty");
  if (layers_.empty() || layers_.front().size() != 1) throw std::invalid_argument("Robp: layer 0 must hold one vertex");
  for (std::size_t j = 0; j < layers_.size(); ++j) {
    if (layers_[j].empty()) throw std::invalid_argument("Robp: empty layer " + std::to_string(j));
    const bool last = j + 1 == layers_.size();
    for (const auto& v : layers_[j]) {
      if (v.is_leaf) continue;
      if (last) throw std::invalid_argument("Robp: every vertex of the last layer must be a leaf");
      if (v.next.size() != alphabet_) {
        throw std::invalid_argument("Robp: vertex in layer " + std::to_string(j) + " lacks one edge per symbol");
      }
      for (auto t : v.next) {
        if (t >= layers_[j + 1].size()) throw std::invalid_argument("Robp: edge target outside the next layer");
      }
    }
  }
}

std::size_t Robp::width() const noexcept {
  std::size_t w = 0;
  for (const auto& layer : layers_) w = std::max(w, layer.size());
  return w;
}

std::int64_t Robp::run(std::span<const std::uint64_t> samples) const {
  std::size_t v = 0;
  for (std::size_t j = 0;; ++j) {
    const Vertex& vert = layers_[j][v];
    if (vert.is_leaf) return vert.label;
    if (j >= samples.size()) throw InsufficientSamples("Robp::run: input ended before a leaf");
    if (samples[j] >= alphabet_) throw std::out_of_range("Robp::run: symbol outside the alphabet");
    v = vert.next[samples[j]];
  }
}

void Robp::write(std::ostream& out) const {
  out << "robp " << length() << ' ' << alphabet_ << '\n' << "widths";
  for (const auto& layer : layers_) out << ' ' << layer.size();
  out << '\n';
  for (const auto& layer : layers_) {
    for (const auto& v : layer) {
      if (v.is_leaf) {
        out << "leaf " << v.label << '\n';
        continue;
      }
      for (std::size_t a = 0; a < v.next.size(); ++a) out << (a ? " " : "") << v.next[a];
      out << '\n';
    }
  }
}

Robp Robp::read(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) throw ParseError(line_no + 1, std::string("missing ") + what);
    ++line_no;
    return std::istringstream(line);
  };

  auto header = next_line("header");
  std::string tag;
  std::size_t m = 0;
  std::uint64_t alphabet = 0;
  if (!(header >> tag >> m >> alphabet) || tag != "robp") throw ParseError(line_no, "expected 'robp <m> <alphabet>'");

  auto widths_line = next_line("widths");
  if (!(widths_line >> tag) || tag != "widths") throw ParseError(line_no, "expected 'widths ...'");
  std::vector<std::size_t> widths(m + 1);
  for (auto& w : widths) {
    if (!(widths_line >> w)) throw ParseError(line_no, "expected m + 1 layer widths");
  }
  if (widths_line >> tag) throw ParseError(line_no, "too many layer widths");

  std::vector<std::vector<Vertex>> layers(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    for (std::size_t v = 0; v < widths[j]; ++v) {
      auto row = next_line("vertex line");
      std::string first;
      if (!(row >> first)) throw ParseError(line_no, "empty vertex line");
      if (first == "leaf") {
        std::int64_t label = 0;
        if (!(row >> label)) throw ParseError(line_no, "leaf needs an integer label");
        layers[j].push_back(Vertex::leaf(label));
        continue;
      }
      std::vector<std::uint32_t> next;
      next.reserve(alphabet);
      std::istringstream all(line);
      std::uint64_t t = 0;
      while (all >> t) {
        if (j == m || t >= widths[j + 1]) throw ParseError(line_no, "edge target outside the next layer");
        next.push_back(static_cast<std::uint32_t>(t));
      }
      if (!all.eof()) throw ParseError(line_no, "edge targets must be integers");
      if (next.size() != alphabet) throw ParseError(line_no, "expected one edge per alphabet symbol");
      layers[j].push_back(Vertex::inner(std::move(next)));
    }
  }
  try {
    return Robp(alphabet, std::move(layers));
  } catch (const std::invalid_argument& e) {
    throw ParseError(line_no, e.what());
  }
}

// ---- problems ----

void FiniteDistinguishingProblem::validate() const {
  if (seed_count == 0 || alphabet == 0) throw std::invalid_argument("problem: empty seed set or alphabet");
  if (d0.size() != alphabet || d1.size() != seed_count) throw DimensionError("problem: distribution shapes");
  auto check_row = [&](const std::vector<double>& row) {
    if (row.size() != alphabet) throw DimensionError("problem: distribution length != alphabet");
    KahanSum s;
    for (double p : row) {
      if (!(p >= 0.0)) throw std::invalid_argument("problem: negative probability");
      s += p;
    }
    if (std::abs(s.value() - 1.0) > 0x1p-40) throw std::invalid_argument("problem: distribution does not sum to 1");
  };
  check_row(d0);
  for (const auto& row : d1) check_row(row);
  if (!has_exact()) return;
  if (d0_num.size() != alphabet || d1_num.size() != seed_count) throw DimensionError("problem: exact shapes");
  auto check_exact = [&](const std::vector<std::uint64_t>& row) {
    if (row.size() != alphabet) throw DimensionError("problem: exact row length != alphabet");
    BigInt s = 0;
    for (auto v : row) s += v;
    if (s != denominator) throw std::invalid_argument("problem: exact row does not sum to the denominator");
  };
  check_exact(d0_num);
  for (const auto& row : d1_num) check_exact(row);
}

FiniteDistinguishingProblem FiniteDistinguishingProblem::local_prg(std::size_t n, const Predicate& p) {
  const std::size_t k = p.arity();
  if (k > n) throw std::invalid_argument("local_prg problem: arity exceeds n");
  if (n > 24) throw BudgetExceeded("local_prg problem: n above 24 is not enumerable");
  const std::uint64_t tuples = falling_factorial(n, k);
  const std::size_t seeds = std::size_t{1} << n;
  if (static_cast<double>(seeds) * static_cast<double>(tuples) > static_cast<double>(1u << 26)) {
    throw BudgetExceeded("local_prg problem: seed and alphabet tables too large");
  }
  FiniteDistinguishingProblem prob;
  prob.seed_count = seeds;
  prob.alphabet = 2 * tuples;
  prob.denominator = 2 * tuples;
  prob.d0_num.assign(prob.alphabet, 1);
  prob.d0.assign(prob.alphabet, 1.0 / static_cast<double>(prob.alphabet));
  std::vector<OrderedTuple> all;
  all.reserve(tuples);
  for (std::uint64_t r = 0; r < tuples; ++r) all.push_back(tuple_unrank(r, n, k));
  prob.d1_num.assign(seeds, std::vector<std::uint64_t>(prob.alphabet, 0));
  prob.d1.assign(seeds, std::vector<double>(prob.alphabet, 0.0));
  const double mass = 1.0 / static_cast<double>(tuples);
  for (std::size_t x = 0; x < seeds; ++x) {
    const BitString seed = BitString::from_uint(x, n);
    for (std::uint64_t r = 0; r < tuples; ++r) {
      const std::uint64_t code = 2 * r + (p.evaluate(project(seed, all[r])) ? 1 : 0);
      prob.d1_num[x][code] = 2;
      prob.d1[x][code] = mass;
    }
  }
  return prob;
}

std::vector<std::vector<std::uint64_t>> enumerate_subspaces(std::size_t n, std::size_t k) {
  if (k > n || n > 20) throw std::invalid_argument("enumerate_subspaces: need k <= n <= 20");
  std::vector<std::vector<std::uint64_t>> out;
  // Reduced echelon form with each row's lowest set bit as its pivot: rows
  // are zero on other pivot columns and below their own pivot.
  std::vector<std::size_t> pivots(k);
  auto emit_for_pivots = [&] {
    std::vector<std::uint64_t> pivot_mask(k);
    std::uint64_t all_pivots = 0;
    for (auto p : pivots) all_pivots |= std::uint64_t{1} << p;
    std::vector<std::pair<std::size_t, std::size_t>> free;  // (row, column)
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t c = pivots[i] + 1; c < n; ++c) {
        if (!((all_pivots >> c) & 1U)) free.emplace_back(i, c);
      }
    }
    for (std::uint64_t fill = 0; fill < (std::uint64_t{1} << free.size()); ++fill) {
      std::vector<std::uint64_t> rows(k);
      for (std::size_t i = 0; i < k; ++i) rows[i] = std::uint64_t{1} << pivots[i];
      for (std::size_t f = 0; f < free.size(); ++f) {
        if ((fill >> f) & 1U) rows[free[f].first] |= std::uint64_t{1} << free[f].second;
      }
      std::vector<std::uint64_t> span(std::size_t{1} << k);
      for (std::uint64_t c = 0; c < span.size(); ++c) {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < k; ++i) {
          if ((c >> i) & 1U) v ^= rows[i];
        }
        span[c] = v;
      }
      std::sort(span.begin(), span.end());
      out.push_back(std::move(span));
    }
  };
  // Iterate pivot sets in lexicographic order.
  for (std::size_t i = 0; i < k; ++i) pivots[i] = i;
  for (;;) {
    emit_for_pivots();
    std::size_t i = k;
    while (i > 0 && pivots[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++pivots[i - 1];
    for (std::size_t r = i; r < k; ++r) pivots[r] = pivots[r - 1] + 1;
  }
  return out;
}

FiniteDistinguishingProblem FiniteDistinguishingProblem::subspace(std::size_t n, std::size_t k) {
  if (n > 16) throw BudgetExceeded("subspace problem: n above 16 is not enumerable");
  const auto spaces = enumerate_subspaces(n, k);
  FiniteDistinguishingProblem prob;
  prob.seed_count = spaces.size();
  prob.alphabet = std::uint64_t{1} << n;
  prob.denominator = prob.alphabet;
  prob.d0_num.assign(prob.alphabet, 1);
  prob.d0.assign(prob.alphabet, 1.0 / static_cast<double>(prob.alphabet));
  prob.d1_num.assign(spaces.size(), std::vector<std::uint64_t>(prob.alphabet, 0));
  prob.d1.assign(spaces.size(), std::vector<double>(prob.alphabet, 0.0));
  const std::uint64_t weight = std::uint64_t{1} << (n - k);
  const double mass = 1.0 / static_cast<double>(std::uint64_t{1} << k);
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    for (auto u : spaces[s]) {
      prob.d1_num[s][u] = weight;
      prob.d1[s][u] = mass;
    }
  }
  return prob;
}

// ---- propagation ----

namespace {

struct LeafMass {
  KahanSum zero;
  KahanSum one;
};

std::int64_t checked_bit_label(const Vertex& v) {
  if (v.label != 0 && v.label != 1) throw std::invalid_argument("distinguishing program leaves must be labelled 0 or 1");
  return v.label;
}

/// Reach probabilities of every layer from 0 to `upto`. Leaves absorb
/// their mass; when `leaves` is set, that mass is added by label.
std::vector<std::vector<double>> propagate(const Robp& p, const std::vector<double>& dist, std::size_t upto,
                                           LeafMass* leaves) {
  std::vector<std::vector<double>> reach;
  reach.reserve(upto + 1);
  reach.push_back({1.0});
  for (std::size_t j = 0; j <= upto; ++j) {
    const auto& cur = reach.back();
    const auto& layer = p.layers()[j];
    const bool last = j == upto;
    std::vector<KahanSum> next(last ? 0 : p.layer_size(j + 1));
    for (std::size_t v = 0; v < layer.size(); ++v) {
      if (cur[v] == 0.0) continue;
      const Vertex& vert = layer[v];
      if (vert.is_leaf) {
        if (leaves) (checked_bit_label(vert) ? leaves->one : leaves->zero) += cur[v];
        continue;
      }
      if (last) continue;
      for (std::size_t a = 0; a < dist.size(); ++a) {
        if (dist[a] != 0.0) next[vert.next[a]] += cur[v] * dist[a];
      }
    }
    if (last) break;
    std::vector<double> values(next.size());
    for (std::size_t v = 0; v < next.size(); ++v) values[v] = next[v].value();
    reach.push_back(std::move(values));
  }
  return reach;
}

/// Exact counterpart: reach numerators over denominator^j at layer j.
std::vector<std::vector<BigInt>> propagate_exact(const Robp& p, const std::vector<std::uint64_t>& dist,
                                                 std::size_t upto) {
  std::vector<std::vector<BigInt>> reach;
  reach.reserve(upto + 1);
  reach.push_back({BigInt(1)});
  for (std::size_t j = 0; j < upto; ++j) {
    const auto& cur = reach.back();
    const auto& layer = p.layers()[j];
    std::vector<BigInt> next(p.layer_size(j + 1), BigInt(0));
    for (std::size_t v = 0; v < layer.size(); ++v) {
      if (cur[v] == 0 || layer[v].is_leaf) continue;
      for (std::size_t a = 0; a < dist.size(); ++a) {
        if (dist[a] != 0) next[layer[v].next[a]] += cur[v] * dist[a];
      }
    }
    reach.push_back(std::move(next));
  }
  return reach;
}

/// Exact leaf mass by label, scaled to denominator^m.
std::pair<BigInt, BigInt> leaf_mass_exact(const Robp& p, const std::vector<std::uint64_t>& dist, std::uint64_t denom) {
  const std::size_t m = p.length();
  const auto reach = propagate_exact(p, dist, m);
  BigInt zero = 0;
  BigInt one = 0;
  for (std::size_t j = 0; j <= m; ++j) {
    BigInt scale = 1;
    for (std::size_t s = j; s < m; ++s) scale *= denom;
    for (std::size_t v = 0; v < reach[j].size(); ++v) {
      const Vertex& vert = p.vertex(j, v);
      if (!vert.is_leaf || reach[j][v] == 0) continue;
      (checked_bit_label(vert) ? one : zero) += reach[j][v] * scale;
    }
  }
  return {zero, one};
}

void require_program_matches(const Robp& p, const FiniteDistinguishingProblem& prob) {
  if (p.alphabet_size() != prob.alphabet) throw DimensionError("program alphabet != problem alphabet");
}

}  // namespace

double exact_success_cost(const Robp& p, const FiniteDistinguishingProblem& prob) {
  double inner = 0.0;
  for (const auto& layer : p.layers()) {
    for (const auto& v : layer) {
      if (!v.is_leaf) inner += 1.0;
    }
  }
  return (static_cast<double>(prob.seed_count) + 1.0) * inner * static_cast<double>(prob.alphabet);
}

double exact_success(const Robp& p, const FiniteDistinguishingProblem& prob, double budget, unsigned threads) {
  require_program_matches(p, prob);
  const double cost = exact_success_cost(p, prob);
  if (cost > budget) {
    throw BudgetExceeded("exact_success: " + std::to_string(cost) + " updates exceed the budget of " +
                         std::to_string(budget));
  }
  LeafMass null_mass;
  propagate(p, prob.d0, p.length(), &null_mass);
  std::vector<double> planted(prob.seed_count);
  parallel_for(prob.seed_count, threads, [&](std::size_t x) {
    LeafMass m;
    propagate(p, prob.d1[x], p.length(), &m);
    planted[x] = m.one.value();
  });
  KahanSum total;
  for (double v : planted) total += v;
  return 0.5 * null_mass.zero.value() + 0.5 * total.value() / static_cast<double>(prob.seed_count);
}

Rational exact_success_rational(const Robp& p, const FiniteDistinguishingProblem& prob) {
  require_program_matches(p, prob);
  if (!prob.has_exact()) throw std::invalid_argument("exact_success_rational: problem has no exact form");
  if (static_cast<double>(prob.seed_count) * static_cast<double>(prob.alphabet) > 65536.0) {
    throw BudgetExceeded("exact_success_rational: |X| * |A| exceeds 2^16");
  }
  const auto [null_zero, null_one] = leaf_mass_exact(p, prob.d0_num, prob.denominator);
  BigInt planted_one = 0;
  for (std::size_t x = 0; x < prob.seed_count; ++x) planted_one += leaf_mass_exact(p, prob.d1_num[x], prob.denominator).second;
  BigInt scale = 1;
  for (std::size_t s = 0; s < p.length(); ++s) scale *= prob.denominator;
  const BigInt seeds = prob.seed_count;
  return Rational(null_zero * seeds + planted_one, 2 * seeds * scale);
}

double exact_learning_success(const Robp& p, const FiniteDistinguishingProblem& prob, unsigned threads) {
  require_program_matches(p, prob);
  if (prob.seed_count > 65536) throw BudgetExceeded("exact_learning_success: more than 2^16 seeds");
  std::vector<double> hit(prob.seed_count);
  parallel_for(prob.seed_count, threads, [&](std::size_t x) {
    const auto reach = propagate(p, prob.d1[x], p.length(), nullptr);
    KahanSum s;
    for (std::size_t j = 0; j < reach.size(); ++j) {
      for (std::size_t v = 0; v < reach[j].size(); ++v) {
        const Vertex& vert = p.vertex(j, v);
        if (vert.is_leaf && vert.label == static_cast<std::int64_t>(x)) s += reach[j][v];
      }
    }
    hit[x] = s.value();
  });
  KahanSum total;
  for (double h : hit) total += h;
  return total.value() / static_cast<double>(prob.seed_count);
}

std::vector<double> layer_reach(const Robp& p, std::size_t j, const FiniteDistinguishingProblem& prob,
                                std::optional<std::size_t> x) {
  require_program_matches(p, prob);
  if (j > p.length()) throw std::out_of_range("layer_reach: layer beyond program length");
  const auto& dist = x ? prob.d1.at(*x) : prob.d0;
  return propagate(p, dist, j, nullptr).back();
}

std::vector<ConditionalSeed> layer_conditionals(const Robp& p, std::size_t j, const FiniteDistinguishingProblem& prob) {
  require_program_matches(p, prob);
  if (j > p.length()) throw std::out_of_range("layer_conditionals: layer beyond program length");
  const std::size_t width = p.layer_size(j);
  // by_seed[x][v] = Pr[reach v | x]
  std::vector<std::vector<double>> by_seed(prob.seed_count);
  for (std::size_t x = 0; x < prob.seed_count; ++x) by_seed[x] = propagate(p, prob.d1[x], j, nullptr).back();
  const double seeds = static_cast<double>(prob.seed_count);
  std::vector<ConditionalSeed> out(width);
  for (std::size_t v = 0; v < width; ++v) {
    KahanSum total;
    for (std::size_t x = 0; x < prob.seed_count; ++x) total += by_seed[x][v];
    out[v].reach = total.value() / seeds;
    if (total.value() == 0.0) continue;
    std::vector<double> posterior(prob.seed_count);
    for (std::size_t x = 0; x < prob.seed_count; ++x) posterior[x] = by_seed[x][v] / total.value();
    out[v].posterior = std::move(posterior);
  }
  return out;
}

ConditionalSeed conditional_seed_dist(const Robp& p, std::size_t j, std::size_t v,
                                      const FiniteDistinguishingProblem& prob) {
  if (j > p.length() || v >= p.layer_size(j)) throw std::out_of_range("conditional_seed_dist: no such vertex");
  return layer_conditionals(p, j, prob)[v];
}

std::vector<std::vector<BigInt>> layer_reach_exact(const Robp& p, std::size_t j,
                                                   const FiniteDistinguishingProblem& prob) {
  require_program_matches(p, prob);
  if (!prob.has_exact()) throw std::invalid_argument("layer_reach_exact: problem has no exact form");
  if (j > p.length()) throw std::out_of_range("layer_reach_exact: layer beyond program length");
  std::vector<std::vector<BigInt>> out(p.layer_size(j), std::vector<BigInt>(prob.seed_count));
  for (std::size_t x = 0; x < prob.seed_count; ++x) {
    const auto reach = propagate_exact(p, prob.d1_num[x], j);
    for (std::size_t v = 0; v < out.size(); ++v) out[v][x] = reach[j][v];
  }
  return out;
}

MinEntropyReport check_min_entropy(const Robp& p, const FiniteDistinguishingProblem& prob, double d_t) {
  require_program_matches(p, prob);
  if (!(d_t > 0.0)) throw std::invalid_argument("check_min_entropy: d_t must be positive");
  const Rational budget = Rational(static_cast<long long>(p.width())) * exact_rational(d_t);  // d * d_t
  const BigInt seeds = prob.seed_count;
  const double seeds_d = static_cast<double>(prob.seed_count);
  MinEntropyReport report;

  // Exact reach for every layer, one propagation per seed.
  std::vector<std::vector<std::vector<BigInt>>> by_seed(prob.seed_count);
  for (std::size_t x = 0; x < prob.seed_count; ++x) by_seed[x] = propagate_exact(p, prob.d1_num.at(x), p.length());

  BigInt scale = 1;  // denominator^j
  for (std::size_t j = 0; j <= p.length(); ++j) {
    for (std::size_t v = 0; v < p.layer_size(j); ++v) {
      BigInt total = 0;
      BigInt top = 0;
      for (std::size_t x = 0; x < prob.seed_count; ++x) {
        const BigInt& r = by_seed[x][j][v];
        total += r;
        if (r > top) top = r;
      }
      if (total == 0) continue;
      ++report.reachable;
      // P_j(v) = total / (|X| scale) >= 1 / (d d_t)
      if (Rational(total) * budget < Rational(seeds * scale)) continue;
      ++report.heavy;
      // max_x P_{x|v}(x) = top / total <= d d_t / |X|
      const Rational lhs = Rational(top * seeds);
      const Rational rhs = budget * Rational(total);
      if (lhs > rhs) ++report.violations;
      report.worst_ratio = std::max(report.worst_ratio, static_cast<double>(lhs / rhs));
    }
    if (j < p.length()) scale *= prob.denominator;
  }

  for (std::size_t j = 0; j <= p.length(); ++j) {
    const auto conds = layer_conditionals(p, j, prob);
    for (std::size_t x = 0; x < prob.seed_count; ++x) {
      KahanSum s;
      for (const auto& c : conds) {
        if (c.defined()) s += (*c.posterior)[x] * c.reach;
      }
      report.total_probability_residual =
          std::max(report.total_probability_residual, std::abs(s.value() - 1.0 / seeds_d));
    }
  }
  return report;
}

// ---- constructions ----

Robp compile_orthogonal_tester(const std::vector<BitString>& vectors, std::size_t per_iter) {
  if (vectors.empty() || per_iter == 0) throw std::invalid_argument("compile_orthogonal_tester: empty schedule");
  const std::size_t n = vectors.front().size();
  if (n > 20) throw std::invalid_argument("compile_orthogonal_tester: n above 20 makes the alphabet too large");
  for (const auto& v : vectors) {
    if (v.size() != n) throw DimensionError("compile_orthogonal_tester: vectors differ in length");
    if (v.none()) throw std::invalid_argument("compile_orthogonal_tester: zero vector");
  }
  const std::uint64_t alphabet = std::uint64_t{1} << n;
  const std::size_t m = vectors.size() * per_iter;
  // Inner-layer vertex 0 = no failure yet in this block, 1 = a failure seen.
  // At a block boundary vertex 1 is the accepting leaf instead.
  std::vector<std::vector<Vertex>> layers(m + 1);
  for (std::size_t t = 0; t < m; ++t) {
    const BitString& v = vectors[t / per_iter];
    const bool closes_block = (t + 1) % per_iter == 0;
    const bool block_start = t % per_iter == 0;
    std::vector<std::uint32_t> from_ok(alphabet);
    std::vector<std::uint32_t> from_failed(alphabet);
    for (std::uint64_t a = 0; a < alphabet; ++a) {
      const bool orth = !inner_product(BitString::from_uint(a, n), v);
      if (closes_block) {
        from_ok[a] = orth ? 1 : 0;  // accept leaf, or next block's start
        from_failed[a] = 0;
      } else {
        from_ok[a] = orth ? 0 : 1;
        from_failed[a] = 1;
      }
    }
    if (t == 0) {
      layers[0].push_back(Vertex::inner(std::move(from_ok)));
    } else if (block_start) {
      layers[t].push_back(Vertex::inner(std::move(from_ok)));
      layers[t].push_back(Vertex::leaf(1));
    } else {
      layers[t].push_back(Vertex::inner(std::move(from_ok)));
      layers[t].push_back(Vertex::inner(std::move(from_failed)));
    }
  }
  layers[m].push_back(Vertex::leaf(0));
  layers[m].push_back(Vertex::leaf(1));
  return Robp(alphabet, std::move(layers));
}

Robp random_robp(std::uint64_t alphabet, std::size_t length, std::size_t width, Rng& rng, std::int64_t label_count,
                 bool early_leaves) {
  if (width == 0 || label_count <= 0) throw std::invalid_argument("random_robp: width and label_count must be positive");
  std::vector<std::vector<Vertex>> layers(length + 1);
  auto random_label = [&] { return static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(label_count))); };
  for (std::size_t j = 0; j <= length; ++j) {
    const std::size_t size = j == 0 ? 1 : width;
    for (std::size_t v = 0; v < size; ++v) {
      const bool leaf = j == length || (early_leaves && j > 0 && rng.uniform_below(4) == 0);
      if (leaf) {
        layers[j].push_back(Vertex::leaf(random_label()));
        continue;
      }
      std::vector<std::uint32_t> next(alphabet);
      for (auto& t : next) t = static_cast<std::uint32_t>(rng.uniform_below(width));
      layers[j].push_back(Vertex::inner(std::move(next)));
    }
  }
  return Robp(alphabet, std::move(layers));
}

}  // namespace streamdist
