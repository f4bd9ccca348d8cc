// SPDX-License-Identifier: Apache-2.0
#include <aoasim/error.hpp>
#include <aoasim/io.hpp>

#include <nlohmann/json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace aoasim {

using nlohmann::json;

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

const char* steering_name(SteeringReference s) {
  return s == SteeringReference::carrier ? "carrier" : "chirp_center";
}

SteeringReference parse_steering(const std::string& s) {
  if (s == "carrier") return SteeringReference::carrier;
  if (s == "chirp_center") return SteeringReference::chirp_center;
  throw Error(ErrorCode::invalid_config, "unknown steering_reference '" + s + "'");
}

const char* window_name(Window w) { return w == Window::hann ? "hann" : "rectangular"; }

Window parse_window(const std::string& s) {
  if (s == "hann") return Window::hann;
  if (s == "rectangular") return Window::rectangular;
  throw Error(ErrorCode::invalid_config, "unknown window '" + s + "'");
}

const char* spacing_name(GridSpacing g) { return g == GridSpacing::sine ? "sine" : "angle"; }

GridSpacing parse_spacing(const std::string& s) {
  if (s == "sine") return GridSpacing::sine;
  if (s == "angle") return GridSpacing::angle;
  throw Error(ErrorCode::invalid_config, "unknown grid spacing '" + s + "'");
}

json to_json(const ScenarioConfig& s) {
  const auto& r = s.radar;
  json fe = json::array();
  for (const auto& p : s.layout.front_ends) {
    fe.push_back({{"azimuth_deg", p.azimuth.degrees()}, {"elevation_deg", p.elevation.degrees()}});
  }
  json ch = json::array();
  for (const auto& c : s.rts.channels) {
    ch.push_back({{"attenuation", c.attenuation},
                  {"delay_s", c.delay_s},
                  {"phase_offset_rad", c.phase_offset_rad},
                  {"hardware_gain", c.hardware_gain}});
  }
  const auto& g = s.processing.grid;
  return {
      {"radar",
       {{"carrier_frequency_hz", r.carrier_frequency_hz},
        {"bandwidth_hz", r.bandwidth_hz},
        {"chirp_period_s", r.chirp_period_s},
        {"num_samples", r.num_samples},
        {"num_tx", r.num_tx},
        {"num_rx", r.num_rx},
        {"tx_spacing_y_m", r.tx_spacing_y_m},
        {"rx_spacing_y_m", r.rx_spacing_y_m},
        {"tx_spacing_z_m", r.tx_spacing_z_m},
        {"rx_spacing_z_m", r.rx_spacing_z_m},
        {"sample_rate_hz", r.sample_rate_hz},
        {"steering_reference", steering_name(r.steering)}}},
      {"layout", {{"range_m", s.layout.range_m}, {"front_ends", fe}}},
      {"rts", {{"intermediate_frequency_hz", s.rts.intermediate_frequency_hz}, {"channels", ch}}},
      {"processing",
       {{"window", window_name(s.processing.window)},
        {"snr_db", s.processing.snr_db ? json(*s.processing.snr_db) : json(nullptr)},
        {"noise_seed", s.processing.noise_seed},
        {"grid",
         {{"az_min_deg", g.az_min_deg},
          {"az_max_deg", g.az_max_deg},
          {"el_min_deg", g.el_min_deg},
          {"el_max_deg", g.el_max_deg},
          {"step_deg", g.step_deg},
          {"spacing", spacing_name(g.spacing)}}}}},
  };
}

ScenarioConfig from_json(const json& j) {
  ScenarioConfig s;
  if (j.contains("radar")) {
    const auto& r = j.at("radar");
    auto& o = s.radar;
    read_opt(r, "carrier_frequency_hz", o.carrier_frequency_hz);
    read_opt(r, "bandwidth_hz", o.bandwidth_hz);
    read_opt(r, "chirp_period_s", o.chirp_period_s);
    read_opt(r, "num_samples", o.num_samples);
    read_opt(r, "num_tx", o.num_tx);
    read_opt(r, "num_rx", o.num_rx);
    read_opt(r, "sample_rate_hz", o.sample_rate_hz);
    if (r.contains("steering_reference")) o.steering = parse_steering(r.at("steering_reference").get<std::string>());
    if (o.carrier_frequency_hz > 0.0 && o.bandwidth_hz > 0.0) o.set_default_spacing();
    read_opt(r, "tx_spacing_y_m", o.tx_spacing_y_m);
    read_opt(r, "rx_spacing_y_m", o.rx_spacing_y_m);
    read_opt(r, "tx_spacing_z_m", o.tx_spacing_z_m);
    read_opt(r, "rx_spacing_z_m", o.rx_spacing_z_m);
  }
  if (j.contains("layout")) {
    const auto& l = j.at("layout");
    read_opt(l, "range_m", s.layout.range_m);
    if (l.contains("front_ends")) {
      const auto& fe = l.at("front_ends");
      if (!fe.is_array() || fe.size() != kNumChannels) {
        throw Error(ErrorCode::invalid_config, "layout.front_ends needs exactly four entries");
      }
      for (std::size_t q = 0; q < kNumChannels; ++q) {
        s.layout.front_ends[q] = {deg(fe[q].at("azimuth_deg").get<double>()),
                                  deg(fe[q].at("elevation_deg").get<double>())};
      }
    }
  }
  if (j.contains("rts")) {
    const auto& r = j.at("rts");
    read_opt(r, "intermediate_frequency_hz", s.rts.intermediate_frequency_hz);
    if (r.contains("channels")) {
      const auto& ch = r.at("channels");
      if (!ch.is_array() || ch.size() != kNumChannels) {
        throw Error(ErrorCode::invalid_config, "rts.channels needs exactly four entries");
      }
      for (std::size_t q = 0; q < kNumChannels; ++q) {
        auto& c = s.rts.channels[q];
        read_opt(ch[q], "attenuation", c.attenuation);
        read_opt(ch[q], "delay_s", c.delay_s);
        read_opt(ch[q], "phase_offset_rad", c.phase_offset_rad);
        read_opt(ch[q], "hardware_gain", c.hardware_gain);
      }
    }
  }
  if (j.contains("processing")) {
    const auto& p = j.at("processing");
    if (p.contains("window")) s.processing.window = parse_window(p.at("window").get<std::string>());
    if (p.contains("snr_db") && !p.at("snr_db").is_null()) s.processing.snr_db = p.at("snr_db").get<double>();
    read_opt(p, "noise_seed", s.processing.noise_seed);
    if (p.contains("grid")) {
      const auto& g = p.at("grid");
      auto& o = s.processing.grid;
      read_opt(g, "az_min_deg", o.az_min_deg);
      read_opt(g, "az_max_deg", o.az_max_deg);
      read_opt(g, "el_min_deg", o.el_min_deg);
      read_opt(g, "el_max_deg", o.el_max_deg);
      read_opt(g, "step_deg", o.step_deg);
      if (g.contains("spacing")) o.spacing = parse_spacing(g.at("spacing").get<std::string>());
    }
  }
  return s;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  try {
    return from_json(parse_json(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config, std::string("scenario: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioConfig load_scenario(const std::filesystem::path& path) { return parse_scenario(read_text_file(path)); }

std::string scenario_to_json(const ScenarioConfig& s, int indent) { return to_json(s).dump(indent); }

std::string scenario_hash(const ScenarioConfig& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json(s).dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

namespace {

static_assert(std::endian::native == std::endian::little, "cube IO assumes a little-endian host");

}  // namespace

void write_cube(const SampleCube& cube, std::ostream& os) {
  const json header = {{"format", "aoasim-cube"},
                       {"version", 1},
                       {"num_tx", cube.num_tx()},
                       {"num_rx", cube.num_rx()},
                       {"num_samples", cube.num_samples()},
                       {"sample_rate_hz", cube.sample_rate_hz()},
                       {"scenario_hash", cube.scenario_hash},
                       {"sample_type", "complex64"}};
  const std::string h = header.dump();
  const auto len = static_cast<std::uint32_t>(h.size());
  os.write(reinterpret_cast<const char*>(&len), sizeof(len));
  os.write(h.data(), static_cast<std::streamsize>(h.size()));
  std::vector<float> buf;
  buf.reserve(2 * cube.data().size());
  for (const auto& v : cube.data()) {
    buf.push_back(static_cast<float>(v.real()));
    buf.push_back(static_cast<float>(v.imag()));
  }
  os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!os) throw Error(ErrorCode::io, "failed to write cube");
}

SampleCube read_cube(std::istream& is) {
  std::uint32_t len = 0;
  if (!is.read(reinterpret_cast<char*>(&len), sizeof(len))) throw Error(ErrorCode::io, "truncated cube header");
  std::string h(len, '\0');
  if (!is.read(h.data(), len)) throw Error(ErrorCode::io, "truncated cube header");
  json header = parse_json(h);
  try {
    if (header.at("format").get<std::string>() != "aoasim-cube") throw Error(ErrorCode::io, "not a cube file");
    SampleCube cube(header.at("num_tx").get<std::size_t>(), header.at("num_rx").get<std::size_t>(),
                    header.at("num_samples").get<std::size_t>(), header.at("sample_rate_hz").get<double>());
    cube.scenario_hash = header.value("scenario_hash", "");
    std::vector<float> buf(2 * cube.data().size());
    if (!is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)))) {
      throw Error(ErrorCode::io, "truncated cube data");
    }
    for (std::size_t i = 0; i < cube.data().size(); ++i) cube.data()[i] = {buf[2 * i], buf[2 * i + 1]};
    return cube;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io, std::string("cube header: ") + e.what());
  }
}

void save_cube(const SampleCube& cube, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot open " + path.string());
  write_cube(cube, out);
}

SampleCube load_cube(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return read_cube(in);
}

std::string calibration_table_json(const CalibrationTable& t, int indent) {
  json j = {{"delay_offsets_s", t.delay_offsets_s}, {"gains", t.gains}};
  return j.dump(indent);
}

CalibrationTable parse_calibration_table(const std::string& text) {
  const json j = parse_json(text);
  try {
    CalibrationTable t;
    t.delay_offsets_s = j.at("delay_offsets_s").get<std::array<double, kNumChannels>>();
    if (j.contains("gains")) t.gains = j.at("gains").get<std::array<double, kNumChannels>>();
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io, std::string("calibration table: ") + e.what());
  }
}

void write_sweep_csv(const std::vector<CalibrationSweep>& sweeps, std::ostream& os) {
  os << "offset_s,angle_error_deg,ref,swept,axis,valid,peak_magnitude\n" << std::setprecision(12);
  for (const auto& s : sweeps) {
    for (std::size_t i = 0; i < s.offsets_s.size(); ++i) {
      os << s.offsets_s[i] << ',' << s.angle_errors_deg[i] << ',' << s.ref << ',' << s.swept << ','
         << (s.axis == Axis::azimuth ? "azimuth" : "elevation") << ',' << (s.valid[i] ? 1 : 0) << ','
         << s.peak_magnitudes[i] << '\n';
    }
  }
}

std::vector<AttenuationSet> parse_attenuations(const std::string& text) {
  const json j = parse_json(text);
  auto one = [](const json& o) {
    AttenuationSet a;
    a.left = o.at("left").get<double>();
    a.right = o.at("right").get<double>();
    a.bottom = o.at("bottom").get<double>();
    a.top = o.at("top").get<double>();
    return a;
  };
  try {
    std::vector<AttenuationSet> out;
    if (j.is_array()) {
      for (const auto& o : j) out.push_back(one(o));
    } else {
      out.push_back(one(j));
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io, std::string("attenuation file: ") + e.what());
  }
}

std::string attenuation_json(const AttenuationSet& a, int indent) {
  json j = {{"left", a.left},
            {"right", a.right},
            {"bottom", a.bottom},
            {"top", a.top},
            {"per_channel", a.per_channel()},
            {"extrapolated", a.extrapolated}};
  return j.dump(indent);
}

}  // namespace aoasim
