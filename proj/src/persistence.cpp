#include "bdc/persistence.hpp"

#include "bdc/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace bdc {

namespace {

std::atomic<std::uint64_t> g_persistence_calls{0};

// Sparse vector over positions within one dimension, sorted by position.
using SparseColumn = std::vector<std::pair<std::size_t, double>>;

constexpr double kDropTolerance = 1e-10;

// a += factor * b
void axpy(SparseColumn& a, double factor, const SparseColumn& b, SparseColumn& scratch) {
  scratch.clear();
  scratch.reserve(a.size() + b.size());
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      scratch.push_back(*ia++);
    } else if (ia == a.end() || ib->first < ia->first) {
      scratch.emplace_back(ib->first, factor * ib->second);
      ++ib;
    } else {
      const double v = ia->second + factor * ib->second;
      if (std::abs(v) > kDropTolerance) scratch.emplace_back(ia->first, v);
      ++ia;
      ++ib;
    }
  }
  a.swap(scratch);
}

void sort_bars(std::vector<Bar>& bars) {
  std::sort(bars.begin(), bars.end(), [](const Bar& a, const Bar& b) {
    if (a.birth != b.birth) return a.birth < b.birth;
    if (a.death != b.death) return a.death < b.death;
    return a.birth_simplex < b.birth_simplex;
  });
}

// Elder-rule pairing of vertices against edges; representatives are
// indicator functions of the dying component.
std::vector<bool> degree_zero(const FilteredComplex& fc, std::vector<Bar>& bars) {
  const auto vertices = fc.of_dimension(0);
  const auto edges = fc.of_dimension(1);
  std::vector<bool> negative_edge(edges.size(), false);

  // Union-find over vertex positions; a root is always the eldest vertex.
  std::vector<std::size_t> parent(vertices.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> members(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) members[i].push_back(i);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto indicator = [&](const std::vector<std::size_t>& comp) {
    Cochain c(0);
    for (std::size_t p : comp) c.set(fc.simplex(vertices[p]), 1.0);
    return c;
  };

  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::size_t g = edges[e];
    auto facets = fc.facets(g);
    std::size_t ra = find(fc.position_in_dimension(facets[0]));
    std::size_t rb = find(fc.position_in_dimension(facets[1]));
    if (ra == rb) continue;
    negative_edge[e] = true;
    if (ra > rb) std::swap(ra, rb);  // ra elder, rb dies
    const std::size_t young = vertices[rb];
    if (fc.value(g) > fc.value(young)) {
      Bar bar;
      bar.degree = 0;
      bar.birth = fc.value(young);
      bar.death = fc.value(g);
      bar.birth_simplex = fc.simplex(young);
      bar.death_simplex = fc.simplex(g);
      bar.representative = indicator(members[rb]);
      bars.push_back(std::move(bar));
    }
    parent[rb] = ra;
    auto& into = members[ra];
    into.insert(into.end(), members[rb].begin(), members[rb].end());
    members[rb].clear();
    members[rb].shrink_to_fit();
  }
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    if (find(v) != v) continue;
    Bar bar;
    bar.degree = 0;
    bar.birth = fc.value(vertices[v]);
    bar.birth_simplex = fc.simplex(vertices[v]);
    bar.representative = indicator(members[v]);
    bars.push_back(std::move(bar));
  }
  return negative_edge;
}

// Reduction of delta^k with columns in reverse filtration order. `cleared`
// marks k-simplices already paired as death simplices in degree k-1.
std::vector<bool> reduce_degree(const FilteredComplex& fc, int k, const std::vector<bool>& cleared,
                                std::vector<Bar>& bars) {
  const auto cells = fc.of_dimension(k);
  const auto cofaces_list = fc.of_dimension(k + 1);
  const std::size_t n = cells.size();

  std::vector<SparseColumn> coboundary(n);
  for (std::size_t p = 0; p < cofaces_list.size(); ++p) {
    auto facets = fc.facets(cofaces_list[p]);
    for (std::size_t j = 0; j < facets.size(); ++j)
      coboundary[fc.position_in_dimension(facets[j])].emplace_back(p, j % 2 == 0 ? 1.0 : -1.0);
  }

  std::vector<bool> negative_next(cofaces_list.size(), false);
  std::vector<SparseColumn> reduced(n);
  std::vector<SparseColumn> basis(n);
  std::unordered_map<std::size_t, std::size_t> pivot_owner;
  SparseColumn scratch;

  for (std::size_t jj = n; jj-- > 0;) {
    if (cleared[jj]) continue;
    SparseColumn& r = reduced[jj];
    SparseColumn& v = basis[jj];
    r = std::move(coboundary[jj]);
    v = {{jj, 1.0}};
    while (!r.empty()) {
      auto it = pivot_owner.find(r.front().first);
      if (it == pivot_owner.end()) break;
      const SparseColumn& other = reduced[it->second];
      const double factor = -r.front().second / other.front().second;
      axpy(r, factor, other, scratch);
      axpy(v, factor, basis[it->second], scratch);
    }

    const std::size_t birth_g = cells[jj];
    Bar bar;
    bar.degree = k;
    bar.birth = fc.value(birth_g);
    bar.birth_simplex = fc.simplex(birth_g);
    std::size_t limit = fc.size();
    if (!r.empty()) {
      const std::size_t pivot = r.front().first;
      pivot_owner.emplace(pivot, jj);
      negative_next[pivot] = true;
      const std::size_t death_g = cofaces_list[pivot];
      if (!(fc.value(death_g) > bar.birth)) continue;
      bar.death = fc.value(death_g);
      bar.death_simplex = fc.simplex(death_g);
      limit = death_g;
    }
    bar.representative = Cochain(k);
    for (const auto& [pos, coeff] : v) {
      const std::size_t g = cells[pos];
      if (g < limit) bar.representative.set(fc.simplex(g), coeff);
    }
    bars.push_back(std::move(bar));
  }
  return negative_next;
}

}  // namespace

std::span<const Bar> Barcode::degree(int k) const {
  if (k < 0 || k > max_degree()) return {};
  return bars_[static_cast<std::size_t>(k)];
}

Barcode compute_persistence(const FilteredComplex& fc, int max_degree) {
  g_persistence_calls.fetch_add(1, std::memory_order_relaxed);
  if (max_degree < 0) throw PreconditionError("max_degree must be >= 0");
  Barcode barcode(max_degree);
  if (fc.size() == 0) return barcode;

  std::vector<bool> cleared = degree_zero(fc, barcode.mutable_degree(0));
  for (int k = 1; k <= max_degree; ++k) {
    if (fc.count_of_dimension(k) == 0) break;
    cleared = reduce_degree(fc, k, cleared, barcode.mutable_degree(k));
  }
  for (int k = 0; k <= max_degree; ++k) sort_bars(barcode.mutable_degree(k));
  return barcode;
}

std::uint64_t persistence_computation_count() {
  return g_persistence_calls.load(std::memory_order_relaxed);
}

Cochain representative_at(const Bar& bar, const FilteredComplex& fc, double t) {
  if (!(t >= bar.birth && t < bar.death))
    throw DomainError(fmt::format("threshold {} outside bar [{}, {})", t, bar.birth, bar.death));
  return restrict(bar.representative, snapshot(fc, t));
}

std::vector<Bar> select_bar(const Barcode& barcode, int degree, const BarPolicy& policy) {
  std::vector<Bar> bars(barcode.degree(degree).begin(), barcode.degree(degree).end());
  std::stable_sort(bars.begin(), bars.end(), [](const Bar& a, const Bar& b) {
    if (a.persistence() != b.persistence()) return a.persistence() > b.persistence();
    if (a.birth != b.birth) return a.birth < b.birth;
    return a.birth_simplex < b.birth_simplex;
  });
  return std::visit(
      [&](const auto& p) -> std::vector<Bar> {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ByIndex>) {
          if (p.index >= bars.size()) return {};
          return {bars[p.index]};
        } else {
          std::erase_if(bars, [](const Bar& b) { return !b.finite(); });
          if constexpr (std::is_same_v<P, Longest>) {
            if (bars.empty()) return {};
            bars.resize(1);
          }
          return bars;
        }
      },
      policy);
}

}  // namespace bdc
