#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lostchance/case_file.hpp"
#include "lostchance/scenarios.hpp"
#include "lostchance/tables.hpp"
#include "lostchance/verify.hpp"

namespace lc = lostchance;

namespace {

constexpr int kOk = 0;
constexpr int kFlagged = 1;
constexpr int kInputError = 2;
constexpr const char* kOutputDirEnv = "LOSTCHANCE_OUTPUT_DIR";

struct EvaluateArgs {
  std::string case_path;
  std::string info = "h-fi";
  std::string connection = "e-c";
  std::string indemnity = "cc-i";
  bool all_policies = false;
  bool csv = false;
  bool strict = false;
};

struct TableArgs {
  int id = 0;
  lc::TableParams params;
  bool strict = false;
};

struct SweepArgs {
  std::string scenario;
  std::string output;
  std::size_t theta_points = 101;
  std::size_t p_points = 101;
  double p0 = 0.95;
  double delta_v = 100000.0;
  std::size_t p1_points = 101;
};

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::vector<lc::PolicyCombo> all_policies(const lc::CaseFile& f) {
  std::vector<lc::Connection> conns{lc::Connection::least_divergence, lc::Connection::independence};
  if (f.is_choice() || f.evidence) conns.insert(conns.begin(), lc::Connection::evidence);
  if (f.published) conns.push_back(lc::Connection::published_table);
  auto grid = lc::policy_grid(conns);
  if (f.partition)
    for (auto conn : conns)
      for (auto ind : {lc::Indemnity::closest, lc::Indemnity::fixed_mean})
        grid.push_back({lc::InfoRestriction::custom, conn, ind});
  return grid;
}

int run_evaluate(const EvaluateArgs& a) {
  const auto file = lc::load_case(a.case_path);
  std::vector<lc::PolicyCombo> combos;
  if (a.all_policies) {
    combos = all_policies(file);
  } else {
    combos.push_back({lc::parse_info(a.info), lc::parse_connection(a.connection), lc::parse_indemnity(a.indemnity)});
  }
  if (a.all_policies && !file.is_choice() && !file.evidence)
    std::cerr << "note: no evidence coupling in the case file; e-c policies skipped\n";

  const auto observed = lc::observed_label(file);
  bool flagged = false;
  std::ostringstream out;
  if (a.csv) lc::write_schedule_csv_header(out);
  for (const auto& combo : combos) {
    const auto s = lc::evaluate_case(file, combo);
    flagged = flagged || !s.flags.empty();
    if (a.csv) {
      lc::write_schedule_csv_rows(out, s);
      continue;
    }
    out << s.policy << '\n';
    out << "  " << pad("outcome", 20) << "  " << pad("X", 12) << "  award\n";
    for (const auto& e : s.entries) {
      const bool mark = observed && *observed == e.label;
      out << (mark ? "* " : "  ") << pad(e.label, 20) << "  " << pad(lc::format_short(e.compensation), 12) << "  "
          << lc::format_short(e.award) << '\n';
    }
    if (s.lambda_star) out << "  lambda* = " << lc::format_short(*s.lambda_star) << '\n';
    if (file.dual && observed) {
      const double main = s.award_at(*observed);
      out << "  mitigation: dual award " << lc::format_short(lc::dual_award(*file.dual, combo)) << ", net award "
          << lc::format_short(lc::mitigation_offset(main, *file.dual, combo)) << '\n';
    }
    for (const auto& n : s.notes) out << "  note: " << n << '\n';
    for (const auto& n : s.flags) out << "  flag: " << n << '\n';
    out << '\n';
  }
  std::cout << out.str();
  if (flagged && a.strict) {
    std::cerr << "computation flags raised (--strict)\n";
    return kFlagged;
  }
  return kOk;
}

int run_table(const TableArgs& a) {
  const auto report = lc::reproduce_table(a.id, a.params);
  std::cout << report.render();
  if (!report.passed()) return kFlagged;
  if (a.strict && report.count(lc::CellStatus::flag) > 0) return kFlagged;
  return kOk;
}

std::filesystem::path sweep_output(const SweepArgs& a) {
  if (!a.output.empty()) return a.output;
  const char* dir = std::getenv(kOutputDirEnv);
  return std::filesystem::path(dir && *dir ? dir : ".") / (a.scenario + ".csv");
}

int run_sweep(const SweepArgs& a) {
  std::ostringstream csv;
  std::size_t rows = 0;
  if (a.scenario == "matos") {
    const auto r = lc::matos_sweep(lc::unit_grid(a.theta_points), lc::unit_grid(a.p_points));
    lc::write_matos_csv(csv, r);
    rows = r.size();
  } else {
    const auto r = lc::medical_sweep(a.p0, a.delta_v, a.p1_points, lc::standard_policy_grid());
    lc::write_medical_csv(csv, r);
    rows = r.size();
  }
  const auto path = sweep_output(a);
  try {
    lc::write_file_atomically(path, csv.str());
  } catch (const std::exception& e) {
    std::cerr << "error: cannot write " << path.string() << ": " << e.what() << '\n';
    return kInputError;
  }
  std::cout << "wrote " << rows << " rows to " << path.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lost-chance damages engine"};
  app.require_subcommand(1);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "evaluate compensation schedules for a case file");
  evaluate->add_option("case", ev.case_path, "case file (JSON)")->required();
  evaluate->add_option("--info", ev.info, "information restriction: l-fi, m-fi, h-fi, custom")->capture_default_str();
  evaluate->add_option("--connection", ev.connection, "connection: e-c, ld-c, i-c, published-table")
      ->capture_default_str();
  evaluate->add_option("--indemnity", ev.indemnity, "indemnity: cc-i, fm-i")->capture_default_str();
  evaluate->add_flag("--all-policies", ev.all_policies, "evaluate every applicable policy combination");
  evaluate->add_flag("--csv", ev.csv, "machine-readable CSV output");
  evaluate->add_flag("--strict", ev.strict, "exit 1 when any computation flag is raised");

  TableArgs tb;
  auto* table = app.add_subcommand("table", "reproduce a published table (2, 4, 5 or 6)");
  table->add_option("id", tb.id, "table id")->required();
  table->add_option("--p0", tb.params.p0, "counterfactual chance (tables 2, 5, 6)")->capture_default_str();
  table->add_option("--p1", tb.params.p1, "factual chance (tables 2, 5, 6)")->capture_default_str();
  table->add_option("--delta-v", tb.params.delta_v, "value difference (tables 2, 5, 6)")->capture_default_str();
  table->add_option("--v-low", tb.params.v_low, "value of the worse outcome (tables 5, 6)")->capture_default_str();
  table->add_flag("--strict", tb.strict, "exit 1 when any cell is flagged");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "write a parameter sweep as CSV");
  sweep->add_option("scenario", sw.scenario, "matos or medical")
      ->required()
      ->check(CLI::IsMember({"matos", "medical"}));
  sweep->add_option("-o,--output", sw.output,
                    std::string("output CSV path (default: $") + kOutputDirEnv + "/<scenario>.csv)");
  sweep->add_option("--theta-points", sw.theta_points, "matos: theta grid points on [0, 1]")->capture_default_str();
  sweep->add_option("--p-points", sw.p_points, "matos: p grid points on [0, 1]")->capture_default_str();
  sweep->add_option("--p0", sw.p0, "medical: counterfactual chance")->capture_default_str();
  sweep->add_option("--delta-v", sw.delta_v, "medical: value difference")->capture_default_str();
  sweep->add_option("--p1-points", sw.p1_points, "medical: p1 grid points on [0, p0]")->capture_default_str();

  lc::VerifyOptions vo;
  bool inject_fault = false;
  auto* verify = app.add_subcommand("verify", "run the seeded random-instance property suite");
  verify->add_option("--seed", vo.seed, "random seed")->capture_default_str();
  verify->add_option("--instances", vo.instances, "number of random instances")->capture_default_str();
  verify->add_flag("--inject-lambda-fault", inject_fault, "offset every solved lambda* by 0.1");

  auto* schema = app.add_subcommand("schema", "print the case-file grammar");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*evaluate) return run_evaluate(ev);
    if (*table) return run_table(tb);
    if (*sweep) return run_sweep(sw);
    if (*verify) {
      if (inject_fault) vo.lambda_fault = 0.1;
      const auto report = lc::run_verification(vo);
      std::cout << report.render();
      return report.ok() ? kOk : kFlagged;
    }
    if (*schema) {
      std::cout << lc::kCaseFileSchema;
      return kOk;
    }
  } catch (const lc::ValidationError& e) {
    std::cerr << "error: invalid case\n";
    for (const auto& issue : e.issues()) std::cerr << "  " << issue << '\n';
    return kInputError;
  } catch (const lc::CaseFileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const lc::ConfigurationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
