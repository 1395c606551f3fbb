#include "se23nav/dataset_io.hpp"

#include "se23nav/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>
#include <system_error>

namespace se23nav {

namespace fs = std::filesystem;

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) {
    throw IoError("read failed: " + path.string());
  }
  return ss.str();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) {
      return out;
    }
    start = comma + 1;
  }
}

/// Lower-case column name without a leading '#' or a trailing "[unit]".
std::string normalize_column(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '#') {
    s.remove_prefix(1);
  }
  if (const auto bracket = s.find('['); bracket != std::string_view::npos) {
    s = s.substr(0, bracket);
  }
  s = trim(s);
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

struct Line {
  std::size_t number = 0;  // 1-based
  std::vector<std::string_view> fields;
};

/// Splits a CSV file into the header columns and data rows. Blank lines are
/// skipped; a trailing '\r' is tolerated.
class CsvFile {
 public:
  explicit CsvFile(const fs::path& path) : text_(read_file(path)) {
    std::string_view rest(text_);
    std::size_t number = 0;
    bool have_header = false;
    while (!rest.empty()) {
      const std::size_t nl = rest.find('\n');
      std::string_view raw = rest.substr(0, nl);
      rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
      ++number;
      if (trim(raw).empty()) {
        continue;
      }
      if (!have_header) {
        for (std::string_view f : split(raw)) {
          header_.push_back(normalize_column(f));
        }
        have_header = true;
        continue;
      }
      rows_.push_back({number, split(raw)});
    }
    if (!have_header) {
      throw ParseError("missing header", 1);
    }
  }

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<Line>& rows() const { return rows_; }

 private:
  std::string text_;
  std::vector<std::string> header_;
  std::vector<Line> rows_;
};

void expect_header(const CsvFile& f, const std::vector<std::vector<std::string>>& accepted, const char* what) {
  for (const auto& names : accepted) {
    if (f.header() == names) {
      return;
    }
  }
  std::string expected;
  for (const auto& n : accepted.front()) {
    expected += expected.empty() ? n : "," + n;
  }
  throw ParseError(std::string("bad ") + what + " header, expected " + expected, 1);
}

void expect_columns(const Line& l, std::size_t n) {
  if (l.fields.size() != n) {
    throw ParseError("expected " + std::to_string(n) + " columns, found " + std::to_string(l.fields.size()),
                     l.number);
  }
}

double parse_double(const Line& l, std::size_t col) {
  const std::string_view s = l.fields[col];
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError("column " + std::to_string(col + 1) + ": invalid number '" + std::string(s) + "'", l.number);
  }
  return v;
}

std::int64_t parse_int(const Line& l, std::size_t col) {
  const std::string_view s = l.fields[col];
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("column " + std::to_string(col + 1) + ": invalid integer '" + std::string(s) + "'", l.number);
  }
  return v;
}

Vec3 parse_vec3(const Line& l, std::size_t col) {
  return {parse_double(l, col), parse_double(l, col + 1), parse_double(l, col + 2)};
}

/// Buffers the whole file and writes it in one go.
class CsvWriter {
 public:
  explicit CsvWriter(std::string header) { out_ << header << '\n'; }

  CsvWriter& field(double v) { return raw(format_double(v)); }
  CsvWriter& field(std::int64_t v) { return raw(std::to_string(v)); }
  CsvWriter& field(const Vec3& v) { return field(v.x()).field(v.y()).field(v.z()); }
  CsvWriter& empty() { return raw(""); }
  void end_row() {
    out_ << '\n';
    first_ = true;
  }

  void save(const fs::path& path) const {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
      throw IoError("cannot open " + path.string() + " for writing");
    }
    const std::string s = out_.str();
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    f.close();
    if (!f) {
      throw IoError("write failed: " + path.string());
    }
  }

 private:
  CsvWriter& raw(const std::string& s) {
    if (!first_) {
      out_ << ',';
    }
    out_ << s;
    first_ = false;
    return *this;
  }

  std::ostringstream out_;
  bool first_ = true;
};

const std::vector<std::string> kImuColumns = {"t_ns", "wx", "wy", "wz", "ax", "ay", "az"};
const std::vector<std::string> kEurocImuColumns = {"timestamp", "w_rs_s_x", "w_rs_s_y", "w_rs_s_z",
                                                   "a_rs_s_x", "a_rs_s_y", "a_rs_s_z"};
const std::vector<std::string> kTruthColumns = {"t_ns", "qw", "qx", "qy", "qz", "px",
                                                "py", "pz", "vx", "vy", "vz"};
const std::vector<std::string> kEurocTruthColumns = {
    "timestamp", "p_rs_r_x", "p_rs_r_y", "p_rs_r_z", "q_rs_w",   "q_rs_x",   "q_rs_y",   "q_rs_z",   "v_rs_r_x",
    "v_rs_r_y",  "v_rs_r_z", "b_w_rs_s_x", "b_w_rs_s_y", "b_w_rs_s_z", "b_a_rs_s_x", "b_a_rs_s_y", "b_a_rs_s_z"};
const std::vector<std::string> kMapColumns = {"id", "px", "py", "pz", "s"};
const std::vector<std::string> kObsColumns = {"t_ns", "id", "yx", "yy", "yz"};

std::string join(const std::vector<std::string>& cols) {
  std::string out;
  for (const auto& c : cols) {
    out += out.empty() ? c : "," + c;
  }
  return out;
}

}  // namespace

std::vector<ImuSample> load_imu_csv(const fs::path& path) {
  const CsvFile f(path);
  expect_header(f, {kImuColumns, kEurocImuColumns}, "IMU");
  std::vector<ImuSample> out;
  out.reserve(f.rows().size());
  std::int64_t last_ns = 0;
  for (const Line& l : f.rows()) {
    expect_columns(l, 7);
    const std::int64_t ns = parse_int(l, 0);
    if (!out.empty() && ns <= last_ns) {
      throw NonMonotonicTime(l.number);
    }
    last_ns = ns;
    out.push_back({to_seconds(ns), parse_vec3(l, 1), parse_vec3(l, 4)});
  }
  return out;
}

std::vector<GroundTruthSample> load_truth_csv(const fs::path& path) {
  const CsvFile f(path);
  expect_header(f, {kTruthColumns, kEurocTruthColumns}, "ground truth");
  const bool euroc = f.header() == kEurocTruthColumns;
  std::vector<GroundTruthSample> out;
  out.reserve(f.rows().size());
  std::int64_t last_ns = 0;
  for (const Line& l : f.rows()) {
    expect_columns(l, f.header().size());
    const std::int64_t ns = parse_int(l, 0);
    if (!out.empty() && ns <= last_ns) {
      throw NonMonotonicTime(l.number);
    }
    last_ns = ns;
    GroundTruthSample g;
    g.t = to_seconds(ns);
    const std::size_t qcol = euroc ? 4 : 1;
    const std::size_t pcol = euroc ? 1 : 5;
    g.q.w = parse_double(l, qcol);
    g.q.v = parse_vec3(l, qcol + 1);
    g.p = parse_vec3(l, pcol);
    g.v = parse_vec3(l, 8);
    if (std::abs(g.q.norm() - 1.0) > 1e-6) {
      throw ParseError("quaternion is not unit norm", l.number);
    }
    out.push_back(g);
  }
  return out;
}

LandmarkMap load_map_csv(const fs::path& path) {
  const CsvFile f(path);
  expect_header(f, {kMapColumns}, "landmark map");
  std::vector<Landmark> entries;
  std::set<std::int64_t> seen;
  for (const Line& l : f.rows()) {
    expect_columns(l, 5);
    const std::int64_t id = parse_int(l, 0);
    if (!seen.insert(id).second) {
      throw ParseError("duplicate landmark id " + std::to_string(id), l.number);
    }
    const double s = parse_double(l, 4);
    if (!(s > 0.0)) {
      throw ParseError("confidence must be positive", l.number);
    }
    entries.push_back({static_cast<int>(id), parse_vec3(l, 1), s});
  }
  return LandmarkMap(std::move(entries));
}

std::vector<LandmarkObservation> load_observations_csv(const fs::path& path, const LandmarkMap& map) {
  const CsvFile f(path);
  expect_header(f, {kObsColumns}, "observation");
  std::vector<LandmarkObservation> out;
  std::int64_t current_ns = 0;
  std::size_t group_line = 0;
  std::set<int> ids;
  auto close_group = [&] {
    if (!out.empty() && out.back().readings.size() < 3) {
      throw InsufficientLandmarks("line " + std::to_string(group_line) + ": observation epoch has " +
                                  std::to_string(out.back().readings.size()) +
                                  " readings, at least three are required");
    }
  };
  for (const Line& l : f.rows()) {
    expect_columns(l, 5);
    const std::int64_t ns = parse_int(l, 0);
    if (out.empty() || ns != current_ns) {
      if (!out.empty() && ns < current_ns) {
        throw NonMonotonicTime(l.number);
      }
      close_group();
      out.push_back({to_seconds(ns), {}});
      current_ns = ns;
      group_line = l.number;
      ids.clear();
    }
    const int id = static_cast<int>(parse_int(l, 1));
    map.at(id);
    if (!ids.insert(id).second) {
      throw ParseError("landmark " + std::to_string(id) + " repeated within one epoch", l.number);
    }
    out.back().readings.push_back({id, parse_vec3(l, 2)});
  }
  close_group();
  return out;
}

LandmarkData load_landmarks(const fs::path& map_path, const fs::path& obs_path) {
  LandmarkData d;
  d.map = load_map_csv(map_path);
  d.report = check_configuration(d.map);
  d.observations = load_observations_csv(obs_path, d.map);
  return d;
}

void write_imu_csv(const fs::path& path, const std::vector<ImuSample>& imu) {
  CsvWriter w("#" + join(kImuColumns));
  for (const ImuSample& s : imu) {
    w.field(to_nanoseconds(s.t)).field(s.omega_m).field(s.a_m);
    w.end_row();
  }
  w.save(path);
}

void write_truth_csv(const fs::path& path, const std::vector<GroundTruthSample>& truth) {
  CsvWriter w("#" + join(kTruthColumns));
  for (const GroundTruthSample& g : truth) {
    w.field(to_nanoseconds(g.t)).field(g.q.w).field(g.q.v).field(g.p).field(g.v);
    w.end_row();
  }
  w.save(path);
}

void write_map_csv(const fs::path& path, const LandmarkMap& map) {
  CsvWriter w(join(kMapColumns));
  for (const Landmark& lm : map.entries()) {
    w.field(static_cast<std::int64_t>(lm.id)).field(lm.p).field(lm.s);
    w.end_row();
  }
  w.save(path);
}

void write_observations_csv(const fs::path& path, const std::vector<LandmarkObservation>& obs) {
  CsvWriter w("#" + join(kObsColumns));
  for (const LandmarkObservation& o : obs) {
    for (const LandmarkReading& r : o.readings) {
      w.field(to_nanoseconds(o.t)).field(static_cast<std::int64_t>(r.id)).field(r.y);
      w.end_row();
    }
  }
  w.save(path);
}

void write_metrics(const RunResult& result, const fs::path& path) {
  const bool with_truth =
      result.rows.empty() ||
      std::any_of(result.rows.begin(), result.rows.end(), [](const EstimateRow& r) { return r.metrics.has_value(); });
  std::string header = "t";
  if (with_truth) {
    header += ",att_err,pos_err,vel_err,grav_err";
  }
  header += ",qw,qx,qy,qz,px,py,pz,vx,vy,vz,gx,gy,gz,sx,sy,sz";
  CsvWriter w(header);
  for (const EstimateRow& r : result.rows) {
    w.field(r.t);
    if (with_truth) {
      if (r.metrics) {
        w.field(r.metrics->attitude).field(r.metrics->position).field(r.metrics->velocity).field(r.metrics->gravity);
      } else {
        w.empty().empty().empty().empty();
      }
    }
    w.field(r.q.w).field(r.q.v).field(r.p).field(r.v).field(r.g_hat).field(r.sigma_hat);
    w.end_row();
  }
  w.save(path);
}

MetricsTable load_metrics_csv(const fs::path& path) {
  const CsvFile f(path);
  MetricsTable t;
  t.columns = f.header();
  for (const Line& l : f.rows()) {
    expect_columns(l, t.columns.size());
    std::vector<double> row;
    row.reserve(l.fields.size());
    for (std::size_t c = 0; c < l.fields.size(); ++c) {
      row.push_back(l.fields[c].empty() ? std::nan("") : parse_double(l, c));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace se23nav
