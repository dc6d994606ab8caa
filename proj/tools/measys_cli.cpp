// Command-line front end: measys_cli MODE --input FILE [options]

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace measys::cli;

  CLI::App app{"Analyze measure-coefficient differential systems J u' + q u = w f"};
  std::string mode;
  std::string output;
  std::string checks;
  Options opts;

  app.add_option("mode", mode, "validate | analyze | solve | kernel | compact | verify")
      ->required()
      ->check(CLI::IsMember({"validate", "analyze", "solve", "kernel", "compact", "verify"}));
  app.add_option("--input", opts.input, "problem file (JSON)")->required();
  app.add_option("--output", output, "write the report here instead of stdout");
  app.add_option("--seed", opts.seed, "seed for randomized verify instances");
  app.add_option("--samples", opts.samples, "grid size for sampled solution values")->check(CLI::PositiveNumber);
  app.add_option("--tol-sing", opts.tol_sing, "relative threshold for singular atoms");
  app.add_option("--tol-rank", opts.tol_rank, "relative singular-value cut for null spaces");
  app.add_option("--checks", checks, "comma-separated verify suites (default: all)");
  app.add_option("--random", opts.random, "number of extra random instances for verify")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_input_error;
  }

  std::stringstream list(checks);
  for (std::string item; std::getline(list, item, ',');) {
    if (!item.empty()) opts.checks.push_back(item);
  }

  const Outcome outcome = run(mode, opts);
  const std::string text = outcome.report.dump(2) + "\n";
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << output << "\n";
      return exit_input_error;
    }
    out << text;
  }
  if (outcome.report.contains("error")) std::cerr << outcome.report["error"]["message"].get<std::string>() << "\n";
  return outcome.exit_code;
}
