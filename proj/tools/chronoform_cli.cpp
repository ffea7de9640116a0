/// @file chronoform_cli.cpp
/// @brief Command-line front end: analyze, form, corpus, climax, recur.
///
/// Exit codes: 0 success, 2 input error (unreadable or malformed input,
/// bad flags), 3 analysis precondition error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chronoform/chronoform.hpp"

namespace cf = chronoform;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitPrecondition = 3;

struct SharedFlags {
  std::string config_path;
  std::string out_path;
  std::string weights;
  std::string window;
  std::optional<double> threshold;
  std::string seed;
  std::string query;
  bool json = false;
  bool hierarchical = false;
};

void add_analysis_flags(CLI::App* cmd, SharedFlags& f) {
  cmd->add_option("--config", f.config_path, "key=value config file");
  cmd->add_option("--out", f.out_path, "write output here instead of stdout");
  cmd->add_option("--weights", f.weights, "salience weights p,d,v");
  cmd->add_option("--window", f.window, "salience window in beats");
  cmd->add_flag("--json", f.json, "JSON output");
}

/// Config file first, then flags on top.
cf::Config effective_config(const SharedFlags& f) {
  cf::Config cfg;
  if (!f.config_path.empty()) cfg = cf::parse_config_text(cf::read_text_file(f.config_path));
  if (!f.weights.empty()) cf::apply_setting(cfg, "weights", f.weights);
  if (!f.window.empty()) cf::apply_setting(cfg, "window", f.window);
  if (f.threshold) cfg.threshold = *f.threshold;
  if (!f.seed.empty()) cf::apply_setting(cfg, "seed", f.seed);
  if (f.hierarchical) cfg.recognition = cf::RecognitionMode::kHierarchical;
  return cfg;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw cf::ParseError("cannot write " + out_path);
  out << text;
}

cf::Piece load(const std::string& path) {
  std::vector<std::string> warnings;
  cf::Piece p = cf::load_score(path, warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return p;
}

cf::Part load_query(const std::string& path) {
  const cf::Piece q = load(path);
  if (q.empty()) throw cf::PreconditionError("query " + path + " has no notes");
  return cf::skyline(q);
}

std::string file_name(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal-structure analysis of symbolic scores", "chronoform"};
  app.set_version_flag("--version", std::string(CHRONOFORM_VERSION));
  app.require_subcommand(1);

  SharedFlags flags;
  std::string input;
  std::string form_string;
  std::size_t steps = 0;

  auto* analyze = app.add_subcommand("analyze", "climax, recurrence and form report as JSON");
  analyze->add_option("input", input, ".notes or .mid score")->required();
  analyze->add_option("--query", flags.query, "query melody (.notes or .mid)");
  analyze->add_option("--form", form_string, "form string to recognize, e.g. AAB");
  analyze->add_option("--seed", flags.seed, "seed form (default AB)");
  analyze->add_option("--threshold", flags.threshold, "recurrence similarity threshold");
  analyze->add_flag("--hierarchical", flags.hierarchical, "recognize at every tree level");
  add_analysis_flags(analyze, flags);

  auto* form = app.add_subcommand("form", "left-replication grammar");
  form->require_subcommand(1);
  auto* generate = form->add_subcommand("generate", "forms reachable from a seed");
  generate->add_option("--seed", flags.seed, "seed form")->required();
  generate->add_option("--steps", steps, "maximum rewrites")->required();
  generate->add_flag("--trees", flags.hierarchical, "print trees instead of flat strings");
  generate->add_flag("--json", flags.json, "JSON output");
  generate->add_option("--out", flags.out_path, "output path");
  auto* recognize = form->add_subcommand("recognize", "minimal derivation from a seed");
  recognize->add_option("form", form_string, "form string")->required();
  recognize->add_option("--seed", flags.seed, "seed form")->required();
  recognize->add_flag("--hierarchical", flags.hierarchical, "recognize at every tree level");
  recognize->add_flag("--json", flags.json, "JSON output");
  recognize->add_option("--out", flags.out_path, "output path");

  auto* corpus = app.add_subcommand("corpus", "climax statistics for a directory, as CSV");
  corpus->add_option("directory", input, "directory of scores")->required();
  add_analysis_flags(corpus, flags);

  auto* climax = app.add_subcommand("climax", "salience curve as CSV (profile with --json)");
  climax->add_option("input", input, ".notes or .mid score")->required();
  add_analysis_flags(climax, flags);

  auto* recur = app.add_subcommand("recur", "recurrences of a query melody as JSON");
  recur->add_option("input", input, ".notes or .mid score")->required();
  recur->add_option("--query", flags.query, "query melody")->required();
  recur->add_option("--threshold", flags.threshold, "similarity threshold");
  add_analysis_flags(recur, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*analyze) {
      const cf::Config cfg = effective_config(flags);
      const cf::Piece piece = load(input);
      cf::AnalysisRequest req;
      req.source = file_name(input);
      if (!flags.query.empty()) req.query = load_query(flags.query);
      if (!form_string.empty()) {
        cf::check_form_string(form_string);
        req.form = form_string;
      }
      emit(cf::to_json_text(cf::analysis_report(piece, req, cfg)), flags.out_path);
    } else if (*generate) {
      const cf::FormTree seed = cf::parse_form_tree(flags.seed);
      std::string text;
      if (flags.hierarchical) {
        std::vector<std::string> trees;
        for (const auto& t : cf::generate(seed, steps)) trees.push_back(cf::to_string(t));
        text = flags.json ? cf::to_json_text(cf::Json(trees)) : "";
        if (!flags.json) {
          for (const auto& t : trees) text += t + "\n";
        }
      } else {
        const auto strings = cf::generate_strings(seed, steps);
        if (flags.json) {
          text = cf::to_json_text(cf::Json(strings));
        } else {
          for (std::size_t i = 0; i < strings.size(); ++i) text += (i ? " " : "") + strings[i];
          text += "\n";
        }
      }
      emit(text, flags.out_path);
    } else if (*recognize) {
      const cf::FormTree seed = cf::parse_form_tree(flags.seed);
      const auto mode = flags.hierarchical ? cf::RecognitionMode::kHierarchical
                                           : cf::RecognitionMode::kFlat;
      const cf::Recognition r = cf::recognize(form_string, seed, mode);
      if (flags.json) {
        emit(cf::to_json_text(cf::recognition_json(form_string, flags.seed, r)), flags.out_path);
      } else {
        emit((r.derivable() ? std::to_string(r.steps) : std::string(cf::status_name(r.status))) + "\n",
             flags.out_path);
      }
    } else if (*corpus) {
      const cf::Config cfg = effective_config(flags);
      const cf::CorpusResult result = cf::analyze_corpus(input, cfg);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      if (result.skipped) std::cerr << "skipped " << result.skipped << " file(s)\n";
      if (result.rows.empty()) {
        std::cerr << "error: no parseable scores in " << input << '\n';
        return kExitInput;
      }
      emit(cf::corpus_csv(result), flags.out_path);
    } else if (*climax) {
      const cf::Config cfg = effective_config(flags);
      const cf::ClimaxProfile profile = cf::analyze_climax(load(input), cfg.salience, cfg.window);
      emit(flags.json ? cf::to_json_text(cf::climax_json(profile)) : cf::curve_csv(profile.curve),
           flags.out_path);
    } else if (*recur) {
      const cf::Config cfg = effective_config(flags);
      const cf::Piece piece = load(input);
      const auto series = cf::find_recurrences(piece, load_query(flags.query), cfg.threshold,
                                               cfg.similarity);
      emit(cf::to_json_text(cf::recurrence_json(series, piece)), flags.out_path);
    }
  } catch (const cf::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const cf::PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
