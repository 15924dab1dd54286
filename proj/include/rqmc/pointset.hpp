#ifndef RQMC_POINTSET_HPP
#define RQMC_POINTSET_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace rqmc {

enum class Generator { iid, sobol, sobol_owen, sobol_digital_shift };

std::string to_string(Generator g);

struct PointSetMeta {
  Generator generator = Generator::iid;
  std::uint64_t seed = 0;
  int dim = 0;
  int count = 0;
};

// Smallest representable offset from the cube boundary; all emitted
// coordinates are clamped to [kCubeClamp, 1 - kCubeClamp] so that inverse
// CDFs downstream stay finite.
inline constexpr double kCubeClamp = 0x1.0p-32;

// N x d points in the open unit cube. `raw` keeps the 32-bit digital
// representation for the sobol family so that scrambling and net-property
// checks can operate on exact dyadic values.
class PointSet {
 public:
  PointSet(std::vector<double> points, std::vector<std::uint32_t> raw, PointSetMeta meta);

  double operator()(int i, int j) const { return points_[static_cast<std::size_t>(i) * meta_.dim + j]; }
  std::uint32_t raw(int i, int j) const { return raw_[static_cast<std::size_t>(i) * meta_.dim + j]; }

  int count() const { return meta_.count; }
  int dim() const { return meta_.dim; }
  const PointSetMeta& meta() const { return meta_; }
  const std::vector<double>& data() const { return points_; }
  bool has_raw() const { return !raw_.empty(); }

  // One point per row, 17 significant digits.
  void write_csv(std::ostream& os) const;

 private:
  std::vector<double> points_;
  std::vector<std::uint32_t> raw_;
  PointSetMeta meta_;
};

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One record per dimension >= 2 of the Joe-Kuo table: primitive polynomial
// degree s, interior coefficients a, and initial direction integers m.
struct DirectionNumberRecord {
  int d_index;
  int s;
  std::uint32_t a;
  std::vector<std::uint32_t> m;
};

class DirectionNumberTable {
 public:
  // Built-in Joe-Kuo "new-joe-kuo-6" numbers covering dimensions <= 64.
  static const DirectionNumberTable& builtin();

  // Parses the published whitespace layout: one line `d s a m_1 ... m_s`
  // per dimension >= 2 (a header line is skipped if present).
  static DirectionNumberTable parse(std::istream& is);
  static DirectionNumberTable load(const std::string& path);

  explicit DirectionNumberTable(std::vector<DirectionNumberRecord> records);

  int max_dim() const { return static_cast<int>(records_.size()) + 1; }
  const DirectionNumberRecord& record(int dim_index) const;  // dim_index >= 2

 private:
  std::vector<DirectionNumberRecord> records_;
};

PointSet generate_sobol(int dim, int n, const DirectionNumberTable& table = DirectionNumberTable::builtin());
PointSet scramble_owen(const PointSet& base, std::uint64_t seed);
PointSet digital_shift(const PointSet& base, std::uint64_t seed);
PointSet generate_iid(int dim, int n, std::uint64_t seed);

// Exact star discrepancy by enumeration of the critical grid; only meant
// for desk-scale instances (dim <= 3 or count <= 512).
double star_discrepancy(const PointSet& ps);

}  // namespace rqmc

#endif
