#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "qsc/report.hpp"

namespace {

using qsc::cli::Report;

std::string read_input(const std::string& path) {
  std::ostringstream text;
  if (path.empty() || path == "-") {
    text << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw qsc::io::InputError("$", "cannot open '" + path + "'");
    text << in.rdbuf();
  }
  return text.str();
}

std::vector<int> parse_order(const std::string& text) {
  std::vector<int> order;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      order.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw qsc::cli::UsageError("--order expects comma-separated agent indices, got '" + text + "'");
    }
  }
  return order;
}

qsc::Quantile parse_quantile(const std::string& text, const char* flag) {
  try {
    return qsc::Quantile(qsc::Rational::parse(text));
  } catch (const std::invalid_argument&) {
    throw qsc::cli::UsageError(std::string(flag) + " expects a rational in [0, 1], got '" + text + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized social choice under quantile utilities"};
  app.require_subcommand(1);

  std::string input;
  std::string output;
  std::string h_override;
  std::string order;
  int dictator = 0;
  auto add_io = [&](CLI::App* sub) {
    sub->add_option("--input", input, "Instance document (JSON); stdin when omitted");
    sub->add_option("--output", output, "Write the report here instead of stdout");
  };
  auto add_run_flags = [&](CLI::App* sub) {
    add_io(sub);
    sub->add_option("--h-override", h_override, "Replace every agent's quantile");
  };

  auto* rep = app.add_subcommand("rep", "Representatives of the lotteries in a lottery_query");
  add_io(rep);
  auto* compare = app.add_subcommand("compare", "Compare x and y at the query's quantile");
  add_io(compare);
  auto* sd = app.add_subcommand("sd-compare", "Stochastic dominance between x and y");
  add_io(sd);

  std::string mechanism;
  auto* vote = app.add_subcommand("vote", "Run a voting rule");
  vote->add_option("rule", mechanism, "r-plurality | top2-half | uniform | dictator")->required();
  vote->add_option("--dictator", dictator, "Agent index for the dictator rule");
  add_run_flags(vote);
  auto* one = app.add_subcommand("one-sided", "Run a one-sided matching mechanism");
  one->add_option("mechanism", mechanism, "sd | psd | top-choice")->required();
  one->add_option("--order", order, "Agent order for sd/psd, e.g. 2,0,1");
  add_run_flags(one);
  auto* two = app.add_subcommand("two-sided", "Run a two-sided matching mechanism");
  two->add_option("mechanism", mechanism, "half-da | efficient-stable | topchoice-bmatching")->required();
  add_run_flags(two);

  std::string property;
  auto* check = app.add_subcommand("check", "Check a property of the document's lottery");
  check->add_option("property", property,
                    "efficiency | proportionality | envy-freeness | stability | distinct-representatives | dr-efficiency")
      ->required();
  add_io(check);

  qsc::cli::AuditOptions audit_options;
  std::string audit_h = "0";
  std::string fixture_name;
  auto* audit = app.add_subcommand("audit", "Search a domain for counterexamples");
  audit->set_help_flag("--help", "Print this help message and exit");
  audit->add_option("suite", audit_options.suite, "sp | efficiency | monotonicity | sd-equivalence")->required();
  audit->add_option("--mechanism", audit_options.mechanism, "Mechanism or rule name");
  audit->add_option("--n", audit_options.n, "Agents (per side for two-sided)");
  audit->add_option("--m", audit_options.m, "Alternatives for voting rules");
  audit->add_option("--h", audit_h, "Common quantile of every agent");
  audit->add_option("--fixture", fixture_name, "Audit one named fixture profile");
  audit->add_option("--trials", audit_options.trials, "sd-equivalence trials");
  audit->add_option("--samples", audit_options.samples, "Two-sided sp: sample profiles instead of enumerating");
  audit->add_option("--seed", audit_options.seed, "Seed for sampled audits");
  audit->add_option("--max-domain", audit_options.max_domain, "Largest exhaustive domain allowed");
  audit->add_option("--order", order, "Agent order for sd/psd");
  audit->add_option("--dictator", dictator, "Agent index for the dictator rule");
  audit->add_option("--output", output, "Write the report here instead of stdout");

  auto* fixtures = app.add_subcommand("fixtures", "Built-in instances");
  fixtures->require_subcommand(1);
  auto* list = fixtures->add_subcommand("list", "Names and descriptions");
  auto* emit = fixtures->add_subcommand("emit", "Print a fixture document");
  emit->add_option("name", fixture_name)->required();
  emit->add_option("--output", output, "Write the document here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    nlohmann::ordered_json body;
    int exit_code = 0;
    auto document = [&] { return qsc::io::parse_document_text(read_input(input)); };
    auto finish = [&](Report r) {
      body = std::move(r.body);
      exit_code = r.exit_code;
    };

    qsc::cli::RunOptions run_options;
    if (!h_override.empty()) run_options.h_override = parse_quantile(h_override, "--h-override");
    if (!order.empty()) run_options.order = parse_order(order);
    run_options.dictator = dictator;

    if (*rep) {
      finish(qsc::cli::run_rep(document()));
    } else if (*compare) {
      finish(qsc::cli::run_compare(document()));
    } else if (*sd) {
      finish(qsc::cli::run_sd_compare(document()));
    } else if (*vote || *one || *two) {
      const auto doc = document();
      finish(qsc::cli::run_mechanism(doc, mechanism, run_options));
    } else if (*check) {
      finish(qsc::cli::run_check(document(), property));
    } else if (*audit) {
      audit_options.h = parse_quantile(audit_h, "--h");
      if (!fixture_name.empty()) audit_options.fixture = fixture_name;
      audit_options.order = run_options.order;
      audit_options.dictator = dictator;
      finish(qsc::cli::run_audit(audit_options));
    } else if (*list) {
      body = nlohmann::ordered_json::array();
      for (const auto& f : qsc::cli::fixture_list()) body.push_back({{"name", f.name}, {"description", f.description}});
    } else if (*emit) {
      body = qsc::io::serialize_document(qsc::cli::fixture(fixture_name));
    }

    const std::string text = body.dump(2) + "\n";
    if (output.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(output);
      if (!out) throw qsc::cli::UsageError("cannot write '" + output + "'");
      out << text;
    }
    return exit_code;
  } catch (const qsc::io::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const qsc::cli::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
