#include "rqmc/pointset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "rqmc/rng.hpp"

namespace rqmc {
namespace {

constexpr int kBits = 32;
constexpr double kScale = 0x1.0p-32;

double clamp_unit(double u) {
  return std::min(std::max(u, kCubeClamp), 1.0 - kCubeClamp);
}

std::vector<double> from_raw(const std::vector<std::uint32_t>& raw) {
  std::vector<double> pts(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    pts[i] = clamp_unit(static_cast<double>(raw[i]) * kScale);
  }
  return pts;
}

}  // namespace

std::string to_string(Generator g) {
  switch (g) {
    case Generator::iid: return "iid";
    case Generator::sobol: return "sobol";
    case Generator::sobol_owen: return "sobol_owen";
    case Generator::sobol_digital_shift: return "sobol_digital_shift";
  }
  return "unknown";
}

PointSet::PointSet(std::vector<double> points, std::vector<std::uint32_t> raw, PointSetMeta meta)
    : points_(std::move(points)), raw_(std::move(raw)), meta_(meta) {
  if (meta_.dim < 1 || meta_.count < 1) throw std::invalid_argument("PointSet: dim and count must be positive");
  if (points_.size() != static_cast<std::size_t>(meta_.dim) * meta_.count)
    throw std::invalid_argument("PointSet: size mismatch");
}

void PointSet::write_csv(std::ostream& os) const {
  os.precision(17);
  for (int i = 0; i < meta_.count; ++i) {
    for (int j = 0; j < meta_.dim; ++j) {
      if (j) os << ',';
      os << (*this)(i, j);
    }
    os << '\n';
  }
}

DirectionNumberTable::DirectionNumberTable(std::vector<DirectionNumberRecord> records)
    : records_(std::move(records)) {
  for (std::size_t k = 0; k < records_.size(); ++k) {
    const auto& r = records_[k];
    if (r.d_index != static_cast<int>(k) + 2)
      throw std::invalid_argument("direction numbers: dimensions must be contiguous from 2");
    if (static_cast<int>(r.m.size()) != r.s)
      throw std::invalid_argument("direction numbers: expected s initial values");
    for (int j = 0; j < r.s; ++j) {
      if (r.m[j] % 2 == 0 || r.m[j] >= (1u << (j + 1)))
        throw std::invalid_argument("direction numbers: m_j must be odd and < 2^j");
    }
  }
}

const DirectionNumberRecord& DirectionNumberTable::record(int dim_index) const {
  if (dim_index < 2 || dim_index > max_dim())
    throw CapacityError("direction-number table has no record for dimension " + std::to_string(dim_index));
  return records_[dim_index - 2];
}

const DirectionNumberTable& DirectionNumberTable::builtin() {
  static const DirectionNumberTable table{std::vector<DirectionNumberRecord>{
#include "sobol_builtin_table.inc"
  }};
  return table;
}

DirectionNumberTable DirectionNumberTable::parse(std::istream& is) {
  std::vector<DirectionNumberRecord> records;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    DirectionNumberRecord r;
    if (!(ls >> r.d_index)) continue;  // header or blank line
    if (!(ls >> r.s >> r.a)) throw std::runtime_error("direction-number file: malformed line: " + line);
    r.m.resize(r.s);
    for (int j = 0; j < r.s; ++j) {
      if (!(ls >> r.m[j])) throw std::runtime_error("direction-number file: missing m values: " + line);
    }
    records.push_back(std::move(r));
  }
  return DirectionNumberTable(std::move(records));
}

DirectionNumberTable DirectionNumberTable::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open direction-number file: " + path);
  return parse(f);
}

PointSet generate_sobol(int dim, int n, const DirectionNumberTable& table) {
  if (dim < 1 || n < 1) throw std::invalid_argument("generate_sobol: dim and n must be positive");
  if (dim > table.max_dim())
    throw CapacityError("generate_sobol: dimension " + std::to_string(dim) + " exceeds table capacity " +
                        std::to_string(table.max_dim()));

  // Direction vectors v[j][k], k = 0..31, left-aligned in 32 bits.
  std::vector<std::uint32_t> v(static_cast<std::size_t>(dim) * kBits);
  for (int k = 0; k < kBits; ++k) v[k] = 1u << (kBits - 1 - k);  // van der Corput
  for (int j = 1; j < dim; ++j) {
    const auto& rec = table.record(j + 1);
    const int s = rec.s;
    std::uint32_t* vj = &v[static_cast<std::size_t>(j) * kBits];
    for (int k = 0; k < std::min(s, kBits); ++k) vj[k] = rec.m[k] << (kBits - 1 - k);
    for (int k = s; k < kBits; ++k) {
      std::uint32_t x = vj[k - s] ^ (vj[k - s] >> s);
      for (int i = 1; i < s; ++i) {
        if ((rec.a >> (s - 1 - i)) & 1u) x ^= vj[k - i];
      }
      vj[k] = x;
    }
  }

  // Gray-code update: point i+1 flips the direction indexed by the lowest
  // zero bit of i.
  std::vector<std::uint32_t> raw(static_cast<std::size_t>(n) * dim, 0u);
  std::vector<std::uint32_t> state(dim, 0u);
  for (int i = 1; i < n; ++i) {
    const int c = std::countr_one(static_cast<std::uint32_t>(i - 1));
    for (int j = 0; j < dim; ++j) {
      state[j] ^= v[static_cast<std::size_t>(j) * kBits + c];
      raw[static_cast<std::size_t>(i) * dim + j] = state[j];
    }
  }

  std::vector<double> pts = from_raw(raw);  // before the move: evaluation order is unspecified
  return PointSet(std::move(pts), std::move(raw), PointSetMeta{Generator::sobol, 0, dim, n});
}

namespace {

// Nested uniform scrambling of one 32-bit coordinate. The permutation bit
// of each node in the binary tree is a keyed hash of the node path, which
// is distributionally equivalent to storing full random permutation trees
// truncated at 32 bits.
std::uint32_t owen_scramble_word(std::uint32_t x, std::uint64_t key) {
  std::uint32_t out = 0;
  for (int k = 0; k < kBits; ++k) {
    // Node id: level k plus the k leading bits already consumed.
    const std::uint64_t node = (static_cast<std::uint64_t>(k) << 32) | (k == 0 ? 0u : (x >> (kBits - k)));
    const std::uint32_t flip = static_cast<std::uint32_t>(mix64(key ^ mix64(node)) & 1u);
    const std::uint32_t bit = (x >> (kBits - 1 - k)) & 1u;
    out = (out << 1) | (bit ^ flip);
  }
  return out;
}

void require_sobol_base(const PointSet& base, const char* op) {
  if (base.meta().generator != Generator::sobol || !base.has_raw())
    throw std::invalid_argument(std::string(op) + ": base must be generated by generate_sobol");
}

}  // namespace

PointSet scramble_owen(const PointSet& base, std::uint64_t seed) {
  require_sobol_base(base, "scramble_owen");
  const int n = base.count(), d = base.dim();
  std::vector<std::uint32_t> raw(static_cast<std::size_t>(n) * d);
  for (int j = 0; j < d; ++j) {
    const std::uint64_t dim_key = derive_key(seed, static_cast<std::uint64_t>(j));
    for (int i = 0; i < n; ++i) {
      raw[static_cast<std::size_t>(i) * d + j] = owen_scramble_word(base.raw(i, j), dim_key);
    }
  }
  std::vector<double> pts = from_raw(raw);
  return PointSet(std::move(pts), std::move(raw), PointSetMeta{Generator::sobol_owen, seed, d, n});
}

PointSet digital_shift(const PointSet& base, std::uint64_t seed) {
  require_sobol_base(base, "digital_shift");
  const int n = base.count(), d = base.dim();
  CounterRng rng(derive_key(seed, 0x5ebedULL));
  std::vector<std::uint32_t> shift(d);
  for (int j = 0; j < d; ++j) shift[j] = rng.next_u32();
  std::vector<std::uint32_t> raw(static_cast<std::size_t>(n) * d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) raw[static_cast<std::size_t>(i) * d + j] = base.raw(i, j) ^ shift[j];
  }
  std::vector<double> pts = from_raw(raw);
  return PointSet(std::move(pts), std::move(raw), PointSetMeta{Generator::sobol_digital_shift, seed, d, n});
}

PointSet generate_iid(int dim, int n, std::uint64_t seed) {
  if (dim < 1 || n < 1) throw std::invalid_argument("generate_iid: dim and n must be positive");
  CounterRng rng(derive_key(seed, 0x11dULL));
  std::vector<double> pts(static_cast<std::size_t>(n) * dim);
  for (auto& p : pts) p = clamp_unit(rng.next_double());
  return PointSet(std::move(pts), {}, PointSetMeta{Generator::iid, seed, dim, n});
}

double star_discrepancy(const PointSet& ps) {
  const int n = ps.count(), d = ps.dim();
  if (d > 3 && n > 512)
    throw CapacityError("star_discrepancy: exact computation requires dim <= 3 or count <= 512");

  // Critical grid: per dimension, the point coordinates plus 1. The sup is
  // attained at a grid node in either the open or the closed box limit.
  std::vector<std::vector<double>> grid(d);
  double cells = 1.0;
  for (int j = 0; j < d; ++j) {
    auto& g = grid[j];
    g.reserve(n + 1);
    for (int i = 0; i < n; ++i) g.push_back(ps(i, j));
    g.push_back(1.0);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    cells *= static_cast<double>(g.size());
  }
  if (cells * n > 5e9) throw CapacityError("star_discrepancy: instance too large for exact enumeration");

  std::vector<std::size_t> idx(d, 0);
  std::vector<double> z(d);
  double best = 0.0;
  for (;;) {
    double vol = 1.0;
    for (int j = 0; j < d; ++j) {
      z[j] = grid[j][idx[j]];
      vol *= z[j];
    }
    int open_count = 0, closed_count = 0;
    for (int i = 0; i < n; ++i) {
      bool in_open = true, in_closed = true;
      for (int j = 0; j < d; ++j) {
        const double x = ps(i, j);
        if (x >= z[j]) in_open = false;
        if (x > z[j]) { in_closed = false; break; }
      }
      open_count += in_open;
      closed_count += in_closed;
    }
    best = std::max(best, std::max(vol - static_cast<double>(open_count) / n,
                                   static_cast<double>(closed_count) / n - vol));
    int j = 0;
    while (j < d && ++idx[j] == grid[j].size()) idx[j++] = 0;
    if (j == d) break;
  }
  return best;
}

}  // namespace rqmc
