#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "sedm/montecarlo.hpp"
#include "sedm/text.hpp"

namespace sedm {

namespace {

constexpr const char* kMagic = "# sedm simulation store v1";
constexpr const char* kFinalsHeader = "run_id,afd,tad_final,delay_flag,overwork_flag,delay_amount,overwork_amount";
constexpr const char* kTrajectoryHeader = "run_id,period,ted,tad";

class LineReader {
public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw StoreFormatError("store line " + std::to_string(number_) + ": " + what);
  }

  void expect(const std::string& wanted) {
    std::string line;
    if (!next(line)) fail("unexpected end of file, wanted '" + wanted + "'");
    if (line != wanted) fail("expected '" + wanted + "', found '" + line + "'");
  }

  std::size_t number() const { return number_; }

private:
  std::istream& in_;
  std::size_t number_ = 0;
};

}  // namespace

void write_store(std::ostream& out, const SimulationStore& store) {
  std::string buf;
  buf.reserve(1 << 16);
  auto flush = [&] {
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    buf.clear();
  };
  auto field = [&](const std::string& text, char end) {
    buf += text;
    buf += end;
  };

  buf += kMagic;
  buf += "\n[header]\nkey,value\n";
  buf += "n_runs," + std::to_string(store.config.n_runs) + '\n';
  buf += "master_seed," + std::to_string(store.config.master_seed) + '\n';
  buf += "value_measure," + to_string(store.config.value_measure) + '\n';
  buf += std::string("store_trajectories,") + (store.config.store_trajectories ? "1" : "0") + '\n';
  buf += "fingerprint," + fingerprint_hex(store.fingerprint) + '\n';
  buf += "generator," + store.generator + '\n';
  buf += "bpd," + format_number(store.bpd) + '\n';
  buf += "tpd_final," + format_number(store.tpd_final) + '\n';

  buf += "[finals]\n";
  buf += kFinalsHeader;
  buf += '\n';
  for (const auto& r : store.records) {
    field(std::to_string(r.run_id), ',');
    field(format_number(r.afd), ',');
    field(format_number(r.tad_final), ',');
    field(std::to_string(r.outcome.delay_flag), ',');
    field(std::to_string(r.outcome.overwork_flag), ',');
    field(format_number(r.outcome.delay_amount), ',');
    field(format_number(r.outcome.overwork_amount), '\n');
    if (buf.size() > (1 << 15)) flush();
  }

  if (store.config.store_trajectories) {
    buf += "[trajectories]\n";
    buf += kTrajectoryHeader;
    buf += '\n';
    for (const auto& r : store.records) {
      const std::string id = std::to_string(r.run_id) + ',';
      for (std::size_t p = 0; p < r.earned.values.size(); ++p) {
        buf += id;
        field(std::to_string(p), ',');
        field(format_number(r.earned.values[p]), ',');
        field(format_number(r.actual.values[p]), '\n');
      }
      if (buf.size() > (1 << 15)) flush();
    }
  }
  flush();
}

SimulationStore read_store(std::istream& in) {
  LineReader reader(in);
  SimulationStore store;
  std::string line;

  reader.expect(kMagic);
  reader.expect("[header]");
  reader.expect("key,value");
  std::map<std::string, std::string> header;
  while (reader.next(line) && line != "[finals]") {
    auto fields = split_fields(line);
    if (fields.size() != 2) reader.fail("header rows need exactly key,value");
    header[std::string(fields[0])] = std::string(fields[1]);
  }
  if (line != "[finals]") reader.fail("missing [finals] section");

  auto get = [&](const char* key) -> const std::string& {
    auto it = header.find(key);
    if (it == header.end()) reader.fail(std::string("header is missing '") + key + "'");
    return it->second;
  };
  try {
    store.config.n_runs = parse_integer<std::size_t>(get("n_runs"));
    store.config.master_seed = parse_integer<std::uint64_t>(get("master_seed"));
    store.config.value_measure = parse_measure(get("value_measure"));
    const auto& traj = get("store_trajectories");
    if (traj != "0" && traj != "1") reader.fail("store_trajectories must be 0 or 1");
    store.config.store_trajectories = traj == "1";
    const auto& fp = get("fingerprint");
    if (fp.size() != 16) reader.fail("fingerprint must be 16 hex digits");
    std::size_t used = 0;
    store.fingerprint = std::stoull(fp, &used, 16);
    if (used != fp.size()) reader.fail("fingerprint must be 16 hex digits");
    store.generator = get("generator");
    store.bpd = parse_number(get("bpd"));
    store.tpd_final = parse_number(get("tpd_final"));
    check_config(store.config);
  } catch (const std::invalid_argument& e) {
    reader.fail(e.what());
  }

  reader.expect(kFinalsHeader);
  store.records.reserve(store.config.n_runs);
  bool saw_trajectories = false;
  while (reader.next(line)) {
    if (line == "[trajectories]") {
      saw_trajectories = true;
      break;
    }
    auto f = split_fields(line);
    if (f.size() != 7) reader.fail("finals rows need 7 fields");
    TrajectoryRecord r;
    try {
      r.run_id = parse_integer<std::size_t>(f[0]);
      r.afd = parse_number(f[1]);
      r.tad_final = parse_number(f[2]);
      r.outcome.delay_flag = parse_integer<int>(f[3]);
      r.outcome.overwork_flag = parse_integer<int>(f[4]);
      r.outcome.delay_amount = parse_number(f[5]);
      r.outcome.overwork_amount = parse_number(f[6]);
    } catch (const std::invalid_argument& e) {
      reader.fail(e.what());
    }
    if (r.run_id != store.records.size()) reader.fail("finals rows must list run ids 0, 1, 2, ...");
    r.earned.measure = r.actual.measure = store.config.value_measure;
    store.records.push_back(std::move(r));
  }
  if (store.records.size() != store.config.n_runs)
    reader.fail("header declares " + std::to_string(store.config.n_runs) + " runs but finals hold " +
                std::to_string(store.records.size()));
  if (saw_trajectories != store.config.store_trajectories)
    reader.fail(saw_trajectories ? "unexpected [trajectories] section" : "missing [trajectories] section");

  if (saw_trajectories) {
    reader.expect(kTrajectoryHeader);
    while (reader.next(line)) {
      if (line.empty()) continue;
      auto f = split_fields(line);
      if (f.size() != 4) reader.fail("trajectory rows need 4 fields");
      try {
        const auto run = parse_integer<std::size_t>(f[0]);
        const auto period = parse_integer<std::size_t>(f[1]);
        if (run >= store.records.size()) reader.fail("trajectory row for unknown run " + std::to_string(run));
        auto& r = store.records[run];
        if (period != r.earned.values.size()) reader.fail("trajectory periods must be consecutive from 0");
        r.earned.values.push_back(parse_number(f[2]));
        r.actual.values.push_back(parse_number(f[3]));
      } catch (const std::invalid_argument& e) {
        reader.fail(e.what());
      }
    }
    for (const auto& r : store.records) {
      if (r.earned.values.size() < 2) reader.fail("run " + std::to_string(r.run_id) + " has no trajectory");
    }
  }
  return store;
}

void save_store(const SimulationStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_store(out, store);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

SimulationStore load_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return read_store(in);
}

SimulationStore load_store(const std::filesystem::path& path, const ProjectNetwork& network) {
  auto store = load_store(path);
  require_fingerprint(store, network);
  return store;
}

}  // namespace sedm
