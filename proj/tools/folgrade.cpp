// Command-line entry point: prove, countermodel, grade, corpus, normalize,
// serve.
//
// Exit codes: 0 success / valid / correct, 1 negative result, 2 resource or
// time limit, 3 usage or input error.

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "folgrade/codec.hpp"
#include "folgrade/grader.hpp"
#include "folgrade/normalize.hpp"
#include "folgrade/parser.hpp"
#include "folgrade/printer.hpp"
#include "folgrade/resolution.hpp"
#include "folgrade/service/http.hpp"
#include "folgrade/tableau.hpp"

namespace fg = folgrade;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitLimit = 2;
constexpr int kExitUsage = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string readFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// "@path" reads the sentence from a file.
std::string sentenceArgument(const std::string& arg) {
  if (!arg.empty() && arg.front() == '@') {
    std::string text = readFile(arg.substr(1));
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
    return text;
  }
  return arg;
}

fg::Json readJson(const std::filesystem::path& path) {
  try {
    return fg::Json::parse(readFile(path));
  } catch (const fg::Json::parse_error& e) {
    throw UsageError(path.string() + " is not valid JSON: " + e.what());
  }
}

std::pair<fg::Formula, fg::Signature> parseSentence(const std::string& arg) {
  return fg::parseInferringSignature(sentenceArgument(arg));
}

int runProve(const std::string& sentence, long timeoutMs, bool quiet) {
  auto [f, sig] = parseSentence(sentence);
  fg::ProofResult r{fg::ProofResult::Status::BudgetExceeded, fg::ProofResult::Limit::Deadline};
  try {
    fg::ClauseSet clauses = fg::clausify(fg::Formula::negation(f));
    r = fg::refute(clauses, {fg::Deadline::after(std::chrono::milliseconds(timeoutMs))});
  } catch (const fg::ClauseExplosion& e) {
    std::cerr << e.what() << '\n';
  }
  switch (r.status) {
    case fg::ProofResult::Status::Refuted:
      std::cout << "VALID\n";
      if (!quiet) fg::printProof(std::cout, r);
      return kExitOk;
    case fg::ProofResult::Status::Saturated:
      std::cout << "NOT-PROVED\n";
      return kExitNegative;
    case fg::ProofResult::Status::BudgetExceeded:
      std::cout << "TIMEOUT\n";
      return kExitLimit;
  }
  return kExitLimit;
}

int runCountermodel(const std::string& sentence, long timeoutMs, std::size_t maxDomain) {
  auto [f, sig] = parseSentence(sentence);
  fg::TableauBudget budget;
  budget.deadline = fg::Deadline::after(std::chrono::milliseconds(timeoutMs));
  budget.maxDomainSize = maxDomain;
  std::optional<fg::Countermodel> cm = fg::findCountermodel(f, sig, budget);
  if (cm) {
    fg::printCountermodel(std::cout, *cm);
    return kExitOk;
  }
  if (budget.deadline.expired()) {
    std::cout << "TIMEOUT\n";
    return kExitLimit;
  }
  std::cout << "none found\n";
  return kExitNegative;
}

int exitCodeFor(fg::Verdict::Status s) {
  switch (s) {
    case fg::Verdict::Status::Correct: return kExitOk;
    case fg::Verdict::Status::Incorrect:
    case fg::Verdict::Status::Rejected: return kExitNegative;
    case fg::Verdict::Status::TimeLimitExceeded: return kExitLimit;
  }
  return kExitLimit;
}

int runGrade(const std::filesystem::path& exerciseFile, const std::string& answer, bool binary, bool json,
             std::optional<long> timeoutMs) {
  fg::ExerciseRecord record = [&] {
    try {
      return fg::exerciseFromJson(readJson(exerciseFile));
    } catch (const fg::ValidationError& e) {
      throw UsageError(exerciseFile.string() + ": " + e.what());
    }
  }();
  if (timeoutMs) record.exercise.timeLimit = std::chrono::milliseconds(*timeoutMs);
  fg::Verdict v = fg::grade(record.exercise, {record.exercise.id, "cli", sentenceArgument(answer)});
  if (json) {
    std::cout << fg::verdictToJson(v, record.exercise, {binary}).dump(2) << '\n';
    return exitCodeFor(v.status);
  }
  fg::Feedback fb = fg::renderFeedback(v, record.exercise, {binary});
  std::cout << fg::toString(v.status) << '\n' << fb.headline << '\n';
  for (const std::string& line : fb.countermodel) std::cout << "  " << line << '\n';
  if (!fb.narrative.empty()) std::cout << fb.narrative << '\n';
  return exitCodeFor(v.status);
}

int runCorpus(const std::filesystem::path& file, const std::optional<std::filesystem::path>& report, unsigned jobs) {
  std::vector<fg::CorpusEntry> entries = [&] {
    try {
      return fg::corpusFromJson(readJson(file));
    } catch (const fg::ValidationError& e) {
      throw UsageError(file.string() + ": " + e.what());
    }
  }();
  struct Row {
    const fg::CorpusEntry* entry;
    const fg::CorpusSubmission* submission;
    std::optional<fg::Verdict::Status> actual;
    long long ms = 0;
  };
  std::vector<Row> rows;
  for (const auto& e : entries) {
    for (const auto& s : e.submissions) rows.push_back({&e, &s, std::nullopt});
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      const auto start = std::chrono::steady_clock::now();
      fg::Verdict v = fg::grade(rows[i].entry->exercise.exercise, {rows[i].entry->exercise.exercise.id, "corpus",
                                                                  rows[i].submission->text});
      rows[i].actual = v.status;
      rows[i].ms =
          std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < std::max(1u, jobs); ++j) pool.emplace_back(worker);
  }

  std::size_t failures = 0;
  fg::Json out = fg::Json::array();
  std::cout << "result  expected   actual     ms  exercise / submission\n";
  for (const Row& r : rows) {
    const bool pass = r.actual == r.submission->expected;
    failures += pass ? 0 : 1;
    char line[64];
    std::snprintf(line, sizeof line, "%-6s  %-9s  %-9s %5lld  ", pass ? "PASS" : "FAIL",
                  fg::toString(r.submission->expected), fg::toString(*r.actual), r.ms);
    std::cout << line << r.entry->exercise.exercise.id << " / " << r.submission->text << '\n';
    out.push_back({{"exercise", r.entry->exercise.exercise.id},
                   {"submission", r.submission->text},
                   {"expected", fg::toString(r.submission->expected)},
                   {"actual", fg::toString(*r.actual)},
                   {"pass", pass}});
  }
  std::cout << rows.size() - failures << "/" << rows.size() << " passed\n";
  if (report) {
    std::ofstream rep(*report);
    if (!rep) throw UsageError("cannot write report " + report->string());
    rep << fg::Json{{"total", rows.size()}, {"failures", failures}, {"rows", out}}.dump(2) << '\n';
  }
  return failures == 0 ? kExitOk : kExitNegative;
}

int runNormalize(const std::string& sentence) {
  auto [f, sig] = parseSentence(sentence);
  fg::Formula nnf = fg::toNNF(f);
  std::cout << "nnf: " << nnf << '\n';
  std::cout << "skolemized: " << fg::skolemize(fg::renameBoundApart(nnf)) << '\n';
  fg::ClauseSet cs = fg::clausify(f);
  std::cout << "clauses:\n";
  for (const fg::Clause& c : cs.clauses) std::cout << "  " << c << '\n';
  return kExitOk;
}

int runServe(const std::filesystem::path& configPath) {
  namespace svc = fg::service;
  svc::Config config = svc::loadConfig(configPath);
  svc::Store store(config.storePath);
  svc::Service service(store, svc::TokenRegistry::load(config.tokenFile), config);
  if (!config.seedDirectory.empty()) {
    std::cerr << "seeded " << service.seed(config.seedDirectory) << " exercise(s) from " << config.seedDirectory
              << '\n';
  }
  svc::HttpServer server(service);

  // Stop cleanly on SIGINT/SIGTERM: the signals are handled synchronously by
  // a dedicated thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::jthread waiter([&] {
    int received = 0;
    sigwait(&signals, &received);
    server.stop();
  });

  std::cerr << "listening on " << config.listen << ':' << config.port << '\n';
  const bool ok = server.listen(config.listen, config.port);
  if (!ok) {
    std::cerr << "cannot listen on " << config.listen << ':' << config.port << '\n';
    pthread_kill(waiter.native_handle(), SIGTERM);
    return kExitLimit;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automated grader for English-to-first-order-logic translation exercises"};
  app.require_subcommand(1);

  long timeoutMs = 5000;
  std::string sentence;
  bool quiet = false;
  auto* prove = app.add_subcommand("prove", "Try to prove a sentence valid by resolution refutation");
  prove->add_option("sentence", sentence, "Sentence, or @file")->required();
  prove->add_option("--timeout", timeoutMs, "Time limit in milliseconds")->check(CLI::PositiveNumber);
  prove->add_flag("--quiet", quiet, "Omit the inference log");

  std::size_t maxDomain = 4;
  auto* counter = app.add_subcommand("countermodel", "Search for a countermodel of a sentence");
  counter->add_option("sentence", sentence, "Sentence, or @file")->required();
  counter->add_option("--max-domain", maxDomain, "Largest domain for finite model search")->check(CLI::PositiveNumber);
  counter->add_option("--timeout", timeoutMs, "Time limit in milliseconds")->check(CLI::PositiveNumber);

  std::filesystem::path exerciseFile;
  std::string answer;
  bool binary = false;
  bool json = false;
  std::optional<long> gradeTimeout;
  auto* gradeCmd = app.add_subcommand("grade", "Grade an answer against an exercise");
  gradeCmd->add_option("--exercise", exerciseFile, "Exercise JSON file")->required()->check(CLI::ExistingFile);
  gradeCmd->add_option("--answer", answer, "Student answer, or @file")->required();
  gradeCmd->add_option("--timeout", gradeTimeout, "Override the exercise time limit (ms)")->check(CLI::PositiveNumber);
  gradeCmd->add_flag("--binary", binary, "Correct/Incorrect only, no countermodel");
  gradeCmd->add_flag("--json", json, "Print the verdict as JSON");

  std::filesystem::path corpusFile;
  std::optional<std::filesystem::path> reportFile;
  unsigned jobs = std::max(1u, std::min(4u, std::thread::hardware_concurrency() / 2));
  auto* corpus = app.add_subcommand("corpus", "Grade a corpus file and compare with expected verdicts");
  corpus->add_option("--file", corpusFile, "Corpus JSON file")->required()->check(CLI::ExistingFile);
  corpus->add_option("--report", reportFile, "Write a JSON report here");
  corpus->add_option("--jobs", jobs, "Parallel grading workers")->check(CLI::PositiveNumber);

  auto* normalize = app.add_subcommand("normalize", "Show the NNF, Skolem form and clauses of a sentence");
  normalize->add_option("sentence", sentence, "Sentence, or @file")->required();

  std::filesystem::path configFile;
  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON grading service");
  serve->add_option("--config", configFile, "Config JSON file (environment variables override it)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*prove) return runProve(sentence, timeoutMs, quiet);
    if (*counter) return runCountermodel(sentence, timeoutMs, maxDomain);
    if (*gradeCmd) return runGrade(exerciseFile, answer, binary, json, gradeTimeout);
    if (*corpus) return runCorpus(corpusFile, reportFile, jobs);
    if (*normalize) return runNormalize(sentence);
    if (*serve) return runServe(configFile);
  } catch (const fg::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fg::ClauseExplosion& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitLimit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
