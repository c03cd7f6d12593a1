// Command-line front end: generate, run, compile, study, analyze.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cip/error.hpp"
#include "cip/generator.hpp"
#include "cip/interpreter.hpp"
#include "cip/json_value.hpp"
#include "cip/stats.hpp"
#include "cip/study.hpp"
#include "cip/synthesizer.hpp"
#include "cip/text.hpp"

namespace fs = std::filesystem;
using namespace cip;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

// Errors caused by what the user passed in, as opposed to operations that
// ran and failed.
int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntaxError:
    case ErrorCode::kUnknownInstruction:
    case ErrorCode::kArityMismatch:
    case ErrorCode::kInvalidBudget:
    case ErrorCode::kPreconditionViolated:
    case ErrorCode::kConfigInvalid:
    case ErrorCode::kOutputUnwritable:
    case ErrorCode::kMalformedInput:
      return kUsage;
    default:
      return kFailure;
  }
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !(out.close(), out)) {
    throw Error(ErrorCode::kOutputUnwritable, "cannot write " + path.string());
  }
}

std::string trim_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

struct GenerateArgs {
  int budget = 0;
  std::uint64_t seed = 0;
  bool working = false;
  int max_attempts = 1000;
  std::string mode = "threaded";
  fs::path output;
};

int cmd_generate(const GenerateArgs& a) {
  GeneratorOptions options;
  options.mode = a.mode == "nested" ? GenerationMode::kNested : GenerationMode::kThreaded;
  const InstructionTable& table = InstructionTable::builtins();
  const RandomPool pool;
  if (a.working) {
    WorkingProgram w = generate_working_program(a.budget, a.seed, table, pool, a.max_attempts, options);
    write_file(a.output, serialize(w.program) + "\n");
    std::cout << "profile: " << profile_name(*w.report.profile) << "\n"
              << "attempts: " << w.attempts << "\n";
  } else {
    write_file(a.output, serialize(generate_random_program(a.budget, a.seed, table, pool, options)) + "\n");
  }
  return kOk;
}

struct RunArgs {
  fs::path file;
  std::string input;
  std::optional<fs::path> registry;
};

int cmd_run(const RunArgs& a) {
  const std::string text = trim_newlines(read_file(a.file));
  const InstructionTable table = a.registry ? registry_table(load_registry(*a.registry)) : InstructionTable::builtins();
  const Program program = parse(text, table);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(a.input);
  } catch (const nlohmann::json::exception&) {
    throw UsageError("--input is not a JSON value: " + a.input);
  }
  const Outcome out = evaluate(program, value_from_json(doc));
  if (!out.ok()) {
    std::cerr << "error: " << fault_name(out.fault()) << "\n";
    return kFailure;
  }
  std::cout << value_to_json(out.value()).dump() << "\n";
  return kOk;
}

struct CompileArgs {
  fs::path spec;
  std::optional<fs::path> registry;
  fs::path output;
};

int cmd_compile(const CompileArgs& a) {
  if (!fs::exists(a.spec)) throw UsageError("no such file: " + a.spec.string());
  const Spec spec = load_spec(a.spec);
  const Registry registry = a.registry ? load_registry(*a.registry) : Registry{};
  const Program program = compile_spec(spec, registry);
  write_file(a.output, serialize(program) + "\n");
  std::size_t cases = 0;
  for (const StepCases& s : spec_step_cases(spec)) cases += s.cases.size();
  std::cout << "steps: " << spec.steps() << "\n"
            << "total_cases: " << cases << "\n"
            << "halstead_length: " << halstead_length(program) << "\n"
            << "size_bytes: " << size_bytes(program) << "\n";
  return kOk;
}

struct StudyArgs {
  int max_steps = 0;
  int per_step = 0;
  std::uint64_t seed = 0;
  fs::path output;
  std::optional<fs::path> audit;
  int workers = 1;
};

int cmd_study(const StudyArgs& a) {
  StudyConfig config;
  config.max_steps = a.max_steps;
  config.programs_per_step = a.per_step;
  config.master_seed = a.seed;
  config.workers = a.workers;
  const auto progress = [](int done, int total) {
    if (done == total || done % std::max(1, total / 100) == 0) {
      std::cerr << "\rstudy: " << done << "/" << total << (done == total ? "\n" : "") << std::flush;
    }
  };
  const StudyResult result = run_study(config, a.output, a.audit, progress);
  const AttemptCounts& r = result.restarts;
  std::cerr << "restarts: " << r.total() << " (not working " << r.not_working << ", too few cuts "
            << r.not_enough_cuts << ", abandoned " << r.abandoned << ", synthesis failures " << r.synthesis_failures
            << ")\n";
  return kOk;
}

struct AnalyzeArgs {
  fs::path input;
  fs::path output;
};

int cmd_analyze(const AnalyzeArgs& a) {
  const std::vector<StudyRecord> records = records_from_csv(read_file(a.input));
  const AnalysisReport report = analyze(records);
  write_file(a.output, report_to_json(report).dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composable inductive programming engine"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a random program");
  generate->add_option("--budget", gen.budget, "Maximum Halstead length")->required();
  generate->add_option("--seed", gen.seed, "Random seed")->required();
  generate->add_flag("--working", gen.working, "Retry until the program passes the working criteria");
  generate->add_option("--max-attempts", gen.max_attempts, "Attempts allowed with --working")->capture_default_str();
  generate->add_option("--mode", gen.mode, "Generator shape")
      ->check(CLI::IsMember({"nested", "threaded"}))
      ->capture_default_str();
  generate->add_option("-o,--output", gen.output, "Program file")->required();

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Evaluate a program on one input");
  run_cmd->add_option("file", run.file, "Program file")->required();
  run_cmd->add_option("--input", run.input, "Input as a JSON value")->required();
  run_cmd->add_option("--registry", run.registry, "Directory of programs available through @name");

  CompileArgs comp;
  auto* compile = app.add_subcommand("compile", "Synthesize a program from a test-case spec");
  compile->add_option("spec", comp.spec, "Spec JSON file")->required();
  compile->add_option("--registry", comp.registry, "Directory of programs named in \"use\"");
  compile->add_option("-o,--output", comp.output, "Program file")->required();

  StudyArgs st;
  auto* study = app.add_subcommand("study", "Run the regeneration study");
  study->add_option("--max-steps", st.max_steps, "Largest chunk count")->required();
  study->add_option("--per-step", st.per_step, "Programs per chunk count")->required();
  study->add_option("--seed", st.seed, "Master seed")->required();
  study->add_option("-o,--output", st.output, "Results CSV")->required();
  study->add_option("--audit", st.audit, "Directory for the audit JSONL");
  study->add_option("--workers", st.workers, "Worker threads")->capture_default_str();

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Analyze a results CSV");
  analyze_cmd->add_option("results", an.input, "Results CSV")->required();
  analyze_cmd->add_option("-o,--output", an.output, "Report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*run_cmd) return cmd_run(run);
    if (*compile) return cmd_compile(comp);
    if (*study) return cmd_study(st);
    if (*analyze_cmd) return cmd_analyze(an);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
