#include <CLI11.hpp>

#include <optional>
#include <string>

#include "nadyn/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Gluing local rational models into one global rational map over Q_p(sqrt p)"};
  app.require_subcommand(1);

  std::string input;
  std::string output;
  std::size_t samples = 20;
  std::size_t steps = 10;
  std::string start;
  std::string name;
  std::optional<std::string> alpha;
  std::optional<std::string> beta;

  auto* glue = app.add_subcommand("glue", "plan, build and certify F for a problem spec");
  glue->add_option("--input", input, "problem spec (JSON)")->required();
  glue->add_option("--output", output, "where to write the result (JSON)");

  auto* verify = app.add_subcommand("verify", "re-certify a result file independently");
  verify->add_option("--input", input, "result file from glue")->required();
  verify->add_option("--samples", samples, "sample points per ball");

  auto* orbit = app.add_subcommand("orbit", "iterate F from a start point");
  orbit->add_option("--input", input, "result file from glue")->required();
  orbit->add_option("--start", start, "start point: a or a,b for a + b sqrt(p)")->required();
  orbit->add_option("--steps", steps, "number of iterations");

  auto* example = app.add_subcommand("example", "run one of the built-in problems");
  example->add_option("--name", name, "ex1 or ex2")->required();
  example->add_option("--alpha", alpha, "ex1: multiplier of the first model");
  example->add_option("--beta", beta, "ex1: coefficient of the second model");
  example->add_option("--output", output, "where to write the result (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nadyn::cli::kInputError;
  }

  using namespace nadyn::cli;
  if (glue->parsed()) return cmd_glue(input, output);
  if (verify->parsed()) return cmd_verify(input, samples);
  if (orbit->parsed()) return cmd_orbit(input, start, steps);
  return cmd_example(name, alpha, beta, output);
}
