#pragma once

// Report assembly shared by the command-line tool and its tests: effective
// configuration, score loading by extension, the analysis report and the
// corpus table. JSON leaves this file with sorted keys and every real number
// printed with exactly six decimals, so identical inputs give identical bytes.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "chronoform/climax.hpp"
#include "chronoform/error.hpp"
#include "chronoform/form_grammar.hpp"
#include "chronoform/midi.hpp"
#include "chronoform/recurrence.hpp"
#include "chronoform/score.hpp"
#include "chronoform/skyline.hpp"
#include "chronoform/text_format.hpp"

#ifndef CHRONOFORM_VERSION
#define CHRONOFORM_VERSION "0.0.0"
#endif

namespace chronoform {

using Json = nlohmann::json;

struct Config {
  SalienceWeights salience{};
  Rational window{4};
  double threshold = 0.6;
  SimilarityWeights similarity{};
  std::string seed = "AB";
  RecognitionMode recognition = RecognitionMode::kFlat;

  friend bool operator==(const Config&, const Config&) = default;
};

namespace detail {

inline std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_real(const std::string& s, const std::string& what) {
  double v = 0;
  const auto* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) throw ParseError("malformed " + what + " '" + s + "'");
  return v;
}

inline std::vector<double> parse_list(const std::string& s, std::size_t n, const std::string& what) {
  std::vector<double> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) out.push_back(parse_real(item, what));
  if (out.size() != n) {
    throw ParseError(what + " expects " + std::to_string(n) + " comma-separated values");
  }
  return out;
}

}  // namespace detail

/// Beats as an integer, a fraction "p/q" or a finite decimal "2.5".
inline Rational parse_beats(const std::string& s) {
  if (auto r = parse_rational(s)) return *r;
  const auto dot = s.find('.');
  if (dot != std::string::npos && s.find('.', dot + 1) == std::string::npos) {
    const std::string frac = s.substr(dot + 1);
    auto whole = parse_rational(s.substr(0, dot).empty() ? "0" : s.substr(0, dot));
    auto digits = parse_rational(frac);
    if (whole && digits && frac.size() <= 9 && whole->denominator() == 1 && frac[0] != '-') {
      std::int64_t scale = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
      const Rational f(digits->numerator(), scale);
      return *whole < 0 ? *whole - f : *whole + f;
    }
  }
  throw ParseError("malformed beat value '" + s + "'");
}

/// Applies one `key=value` setting. Unknown keys are errors.
inline void apply_setting(Config& cfg, const std::string& key, const std::string& value) {
  if (key == "weights") {
    auto w = detail::parse_list(value, 3, "weights");
    cfg.salience = {w[0], w[1], w[2]};
  } else if (key == "window") {
    cfg.window = parse_beats(value);
  } else if (key == "threshold") {
    cfg.threshold = detail::parse_real(value, "threshold");
  } else if (key == "similarity_weights") {
    auto w = detail::parse_list(value, 2, "similarity_weights");
    cfg.similarity = {w[0], w[1]};
  } else if (key == "seed") {
    parse_form_tree(value);
    cfg.seed = value;
  } else if (key == "recognition") {
    if (value == "flat") {
      cfg.recognition = RecognitionMode::kFlat;
    } else if (value == "hierarchical") {
      cfg.recognition = RecognitionMode::kHierarchical;
    } else {
      throw ParseError("recognition must be flat or hierarchical");
    }
  } else {
    throw ParseError("unknown config key '" + key + "'");
  }
}

/// Simple `key = value` text; '#' starts a comment line.
inline Config parse_config_text(std::string_view text, Config cfg = {}) {
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string line(detail::trim(raw));
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config: expected key=value", line_no);
    const std::string key(detail::trim(std::string_view(line).substr(0, eq)));
    const std::string value(detail::trim(std::string_view(line).substr(eq + 1)));
    try {
      apply_setting(cfg, key, value);
    } catch (const ParseError& e) {
      throw ParseError(std::string("config: ") + e.what(), line_no);
    }
  }
  return cfg;
}

inline std::map<std::string, std::string> config_entries(const Config& cfg) {
  using detail::shortest;
  return {
      {"recognition", cfg.recognition == RecognitionMode::kFlat ? "flat" : "hierarchical"},
      {"seed", cfg.seed},
      {"similarity_weights", shortest(cfg.similarity.pitch) + "," + shortest(cfg.similarity.rhythm)},
      {"threshold", shortest(cfg.threshold)},
      {"weights", shortest(cfg.salience.pitch) + "," + shortest(cfg.salience.density) + "," +
                      shortest(cfg.salience.velocity)},
      {"window", to_string(cfg.window)},
  };
}

/// The effective configuration in config-file syntax; reparses to `cfg`.
inline std::string config_text(const Config& cfg) {
  std::string out;
  for (const auto& [k, v] : config_entries(cfg)) out += k + "=" + v + "\n";
  return out;
}

inline Config config_from_json(const Json& block) {
  Config cfg;
  for (const auto& [k, v] : block.items()) apply_setting(cfg, k, v.get<std::string>());
  return cfg;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string lower_extension(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

inline bool is_score_path(const std::string& path) {
  const std::string ext = lower_extension(path);
  return ext == ".notes" || ext == ".mid" || ext == ".midi";
}

/// .notes or .mid/.midi, chosen by extension.
inline Piece load_score(const std::string& path, std::vector<std::string>& warnings) {
  const std::string ext = lower_extension(path);
  try {
    if (ext == ".notes") return parse_text(read_text_file(path));
    if (ext == ".mid" || ext == ".midi") {
      const auto bytes = read_binary_file(path);
      std::vector<std::string> midi_warnings;
      Piece p = import_midi(bytes, midi_warnings);
      for (auto& w : midi_warnings) warnings.push_back(path + ": " + w);
      return p;
    }
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
  throw ParseError(path + ": unsupported file extension '" + ext + "'");
}

/// Serializes with sorted keys, two-space indentation and six-decimal reals.
inline void write_json(std::string& out, const Json& j, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (const auto& [k, v] : j.items()) {
        out += inner + Json(k).dump() + ": ";
        write_json(out, v, indent + 1);
        out += ++i < j.size() ? ",\n" : "\n";
      }
      out += pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += inner;
        write_json(out, j[i], indent + 1);
        out += i + 1 < j.size() ? ",\n" : "\n";
      }
      out += pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      char buf[64];
      double v = j.get<double>();
      std::snprintf(buf, sizeof buf, "%.6f", v == 0.0 ? 0.0 : v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

inline std::string to_json_text(const Json& j) {
  std::string out;
  write_json(out, j);
  return out + "\n";
}

inline Json piece_json(const Piece& piece, const std::string& source) {
  Json j;
  j["source"] = source;
  j["title"] = piece.title;
  j["key"] = piece.key ? Json(key_name(*piece.key)) : Json(nullptr);
  j["beats_total"] = to_double(piece.beats_total());
  j["parts"] = piece.parts.size();
  j["events"] = piece.event_count();
  return j;
}

inline Json climax_json(const ClimaxProfile& c) {
  Json j;
  j["beats_total"] = to_double(c.beats_total);
  j["peak_time"] = to_double(c.peak_time);
  j["normalized_position"] = c.normalized_position;
  j["asymmetry_index"] = c.asymmetry_index;
  j["pre_mass_fraction"] = c.pre_mass_fraction;
  j["samples"] = c.curve.size();
  return j;
}

inline Json recurrence_json(const RecurrenceSeries& s, const Piece& piece) {
  Json j;
  j["query_steps"] = s.query.size();
  j["matches"] = Json::array();
  for (const auto& m : s.matches) {
    Json row;
    row["occurrence_index"] = m.occurrence_index;
    row["voice"] = m.voice;
    row["start"] = to_double(m.start);
    row["end"] = to_double(m.end);
    row["notes"] = m.note_count;
    row["similarity"] = m.similarity;
    row["deviation"] = m.deviation;
    if (piece.key) row["chromaticism_index"] = chromaticism_index(excerpt(piece, m.start, m.end), *piece.key);
    j["matches"].push_back(row);
  }
  j["outlier_index"] = s.outlier_index ? Json(*s.outlier_index) : Json(nullptr);
  return j;
}

inline const char* status_name(Recognition::Status s) {
  switch (s) {
    case Recognition::Status::kDerivable: return "derivable";
    case Recognition::Status::kNotDerivable: return "not derivable";
    case Recognition::Status::kBoundExceeded: return "search bound exceeded";
  }
  return "not derivable";
}

inline Json recognition_json(const std::string& form, const std::string& seed, const Recognition& r) {
  Json j;
  j["form"] = form;
  j["seed"] = seed;
  j["status"] = status_name(r.status);
  j["derivable"] = r.derivable();
  j["minimal_steps"] = r.derivable() ? Json(r.steps) : Json(nullptr);
  Json paths = Json::array();
  if (r.derivation) {
    for (const auto& p : r.derivation->steps) paths.push_back(path_string(p));
  }
  j["steps"] = paths;
  return j;
}

struct AnalysisRequest {
  std::string source;
  std::optional<Part> query;
  std::optional<std::string> form;
};

/// The full analysis report: climax always, recurrence with a query, form
/// recognition with a form string. Precondition failures propagate.
inline Json analysis_report(const Piece& piece, const AnalysisRequest& req, const Config& cfg) {
  Json report;
  report["tool"] = {{"name", "chronoform"}, {"version", CHRONOFORM_VERSION}};
  report["config"] = config_entries(cfg);
  report["piece"] = piece_json(piece, req.source);

  const ClimaxProfile climax = analyze_climax(piece, cfg.salience, cfg.window);
  report["climax"] = climax_json(climax);

  if (req.query) {
    report["recurrence"] =
        recurrence_json(find_recurrences(piece, *req.query, cfg.threshold, cfg.similarity), piece);
  }
  if (req.form) {
    const FormTree seed = parse_form_tree(cfg.seed);
    const Recognition r = recognize(*req.form, seed, cfg.recognition);
    Json form = recognition_json(*req.form, cfg.seed, r);
    // Each rewrite adds one copy of the opening unit; A and B taken as equal length.
    form["predicted_climax_position"] =
        r.derivable()
            ? Json(to_double(predicted_climax_position(static_cast<int>(r.steps) + 1, 1, 1)))
            : Json(nullptr);
    form["measured_climax_position"] = climax.normalized_position;
    report["form"] = form;
  }
  return report;
}

struct CorpusRow {
  std::string file;
  double beats_total = 0;
  double normalized_position = 0;
  double asymmetry_index = 0;
  double pre_mass_fraction = 0;
};

struct CorpusResult {
  std::vector<CorpusRow> rows;  // sorted by file name
  std::vector<std::string> warnings;
  std::size_t skipped = 0;
};

/// Climax statistics for every score file (.notes, .mid, .midi) directly
/// inside `dir`. Files are analyzed concurrently; rows come back in file-name
/// order.
inline CorpusResult analyze_corpus(const std::string& dir, const Config& cfg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw ParseError(dir + ": not a directory");
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename().string().front() != '.' &&
        is_score_path(entry.path().string())) {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());

  struct Outcome {
    std::optional<CorpusRow> row;
    std::vector<std::string> warnings;
  };
  std::vector<std::future<Outcome>> jobs;
  for (const auto& f : files) {
    jobs.push_back(std::async(std::launch::async, [f, &cfg] {
      Outcome out;
      try {
        const Piece piece = load_score(f, out.warnings);
        const ClimaxProfile c = analyze_climax(piece, cfg.salience, cfg.window);
        out.row = CorpusRow{fs::path(f).filename().string(), to_double(c.beats_total),
                            c.normalized_position, c.asymmetry_index, c.pre_mass_fraction};
      } catch (const std::exception& e) {
        out.warnings.push_back(std::string("skipped ") + e.what());
      }
      return out;
    }));
  }

  CorpusResult result;
  for (auto& job : jobs) {
    Outcome o = job.get();
    result.warnings.insert(result.warnings.end(), o.warnings.begin(), o.warnings.end());
    if (o.row) {
      result.rows.push_back(*o.row);
    } else {
      ++result.skipped;
    }
  }
  return result;
}

inline std::string corpus_csv(const CorpusResult& result) {
  std::string out = "file,beats_total,normalized_position,asymmetry_index,pre_mass_fraction\n";
  char buf[256];
  std::vector<double> positions;
  for (const auto& r : result.rows) {
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f,%.6f\n", r.file.c_str(), r.beats_total,
                  r.normalized_position, r.asymmetry_index, r.pre_mass_fraction);
    out += buf;
    positions.push_back(r.normalized_position);
  }
  if (positions.empty()) return out;
  double sum = 0;
  for (double p : positions) sum += p;
  std::sort(positions.begin(), positions.end());
  const std::size_t n = positions.size();
  const double median = n % 2 ? positions[n / 2] : (positions[n / 2 - 1] + positions[n / 2]) / 2;
  std::snprintf(buf, sizeof buf, "mean,,%.6f,,\nmedian,,%.6f,,\n", sum / static_cast<double>(n), median);
  out += buf;
  return out;
}

}  // namespace chronoform
