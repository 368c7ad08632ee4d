// piglet — command-line front end over the pigletcatch C API.
//
// Exit codes: 0 success, 1 usage/configuration error, 2 failed command
// assertion (tof bands, gradcheck tolerance).

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pigletcatch.h"

namespace {

struct ContextDeleter {
  void operator()(pgc_context* ctx) const { pgc_context_destroy(ctx); }
};
using ContextPtr = std::unique_ptr<pgc_context, ContextDeleter>;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string pipeline;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = -1;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "JSON configuration file");
  cmd->add_option("--out", args->out_dir, "output directory");
  cmd->add_option("--seed", args->seed, "master seed")
      ->each([args](const std::string&) { args->seed_given = true; });
  cmd->add_option("--pipeline", args->pipeline,
                  "localizer+predictor, e.g. color+ballistic or cnn+cnn");
  cmd->add_option("--threads", args->threads, "worker threads (0 = all cores)");
  cmd->add_option("--set", args->sets,
                  "config override key=value (repeatable), e.g. "
                  "--set throws.drag_coeff=0.05");
}

int fail(pgc_context* ctx, pgc_status status, const char* command) {
  std::fprintf(stderr, "piglet %s: %s: %s\n", command, pgc_status_name(status),
               ctx ? pgc_last_error(ctx) : "");
  switch (status) {
    case PGC_E_CHECK:
      return 2;
    case PGC_E_USAGE:
      return 1;
    default:
      return 1;
  }
}

// Builds the context and applies common overrides; returns nullptr after
// printing an error.
ContextPtr make_context(const CommonArgs& args, const char* command) {
  pgc_context* raw = nullptr;
  pgc_status status;
  if (!args.config_path.empty())
    status = pgc_context_create_from_file(args.config_path.c_str(), &raw);
  else
    status = pgc_context_create(nullptr, &raw);
  if (status != PGC_OK) {
    std::fprintf(stderr, "piglet %s: cannot load configuration (%s)\n", command,
                 args.config_path.c_str());
    return nullptr;
  }
  ContextPtr ctx(raw);

  if (args.seed_given &&
      pgc_set(ctx.get(), "seed", std::to_string(args.seed).c_str()) != PGC_OK) {
    std::fprintf(stderr, "piglet %s: %s\n", command, pgc_last_error(ctx.get()));
    return nullptr;
  }
  if (args.threads >= 0 &&
      pgc_set(ctx.get(), "run.threads", std::to_string(args.threads).c_str()) != PGC_OK) {
    std::fprintf(stderr, "piglet %s: %s\n", command, pgc_last_error(ctx.get()));
    return nullptr;
  }
  if (!args.pipeline.empty()) {
    const auto plus = args.pipeline.find('+');
    if (plus == std::string::npos) {
      std::fprintf(stderr,
                   "piglet %s: --pipeline wants <color|cnn>+<ballistic|cnn>\n", command);
      return nullptr;
    }
    const std::string localizer = "\"" + args.pipeline.substr(0, plus) + "\"";
    const std::string predictor = "\"" + args.pipeline.substr(plus + 1) + "\"";
    if (pgc_set(ctx.get(), "pipeline.localizer", localizer.c_str()) != PGC_OK ||
        pgc_set(ctx.get(), "pipeline.predictor", predictor.c_str()) != PGC_OK) {
      std::fprintf(stderr, "piglet %s: %s\n", command, pgc_last_error(ctx.get()));
      return nullptr;
    }
  }
  for (const std::string& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "piglet %s: --set wants key=value, got '%s'\n", command,
                   kv.c_str());
      return nullptr;
    }
    if (pgc_set(ctx.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()) !=
        PGC_OK) {
      std::fprintf(stderr, "piglet %s: %s\n", command, pgc_last_error(ctx.get()));
      return nullptr;
    }
  }
  return ctx;
}

int print_result(pgc_context* ctx) {
  char* text = nullptr;
  if (pgc_last_result_json(ctx, &text) == PGC_OK && text) {
    std::fputs(text, stdout);
    pgc_string_free(text);
  }
  return 0;
}

const char* opt_dir(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale object-catching simulator: ballistic throws, camera+radar "
               "sensing, baseline and CNN interception pipelines"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  CommonArgs args;
  int throws = 0;
  std::string data_dir;

  auto* simulate = app.add_subcommand("simulate", "run one episode and write trace CSVs");
  add_common(simulate, &args);

  auto* eval = app.add_subcommand("eval", "Monte Carlo catch-rate experiment");
  add_common(eval, &args);
  eval->add_option("--throws", throws, "number of simulated throws")->default_val(20);

  auto* compare = app.add_subcommand(
      "compare", "all four localizer x predictor pipelines on paired throws");
  add_common(compare, &args);
  compare->add_option("--throws", throws, "throws per pipeline")->default_val(20);

  auto* tof = app.add_subcommand("tof", "time-of-flight table per throw distance");
  add_common(tof, &args);
  tof->add_option("--throws", throws, "throws per distance")->default_val(200);

  auto* blur = app.add_subcommand("blur-study",
                                  "localization error vs vertical motion blur");
  add_common(blur, &args);

  auto* gradcheck = app.add_subcommand(
      "gradcheck", "finite-difference verification of every layer and both networks");
  add_common(gradcheck, &args);

  auto* gen_traj = app.add_subcommand("gen-trajectory-data",
                                      "generate the interception training dataset");
  add_common(gen_traj, &args);

  auto* gen_loc = app.add_subcommand("gen-localizer-data",
                                     "generate the localization training dataset");
  add_common(gen_loc, &args);

  auto* train_int = app.add_subcommand("train-interceptor",
                                       "train the interception network");
  add_common(train_int, &args);
  train_int->add_option("--data", data_dir, "dataset directory (default: synthesize)");

  auto* train_loc = app.add_subcommand("train-localizer",
                                       "train the localization network");
  add_common(train_loc, &args);
  train_loc->add_option("--data", data_dir, "dataset directory (default: synthesize)");

  auto* dump = app.add_subcommand("dump-config",
                                  "print the effective configuration and exit");
  add_common(dump, &args);

  CLI11_PARSE(app, argc, argv);

  const CLI::App* active = app.get_subcommands().front();
  const std::string name = active->get_name();

  ContextPtr ctx = make_context(args, name.c_str());
  if (!ctx) return 1;

  pgc_status status = PGC_OK;
  if (name == "simulate") {
    status = pgc_simulate(ctx.get(), opt_dir(args.out_dir));
  } else if (name == "eval") {
    status = pgc_eval(ctx.get(), throws, opt_dir(args.out_dir));
  } else if (name == "compare") {
    status = pgc_compare(ctx.get(), throws, opt_dir(args.out_dir));
  } else if (name == "tof") {
    status = pgc_tof(ctx.get(), throws, opt_dir(args.out_dir));
  } else if (name == "blur-study") {
    status = pgc_blur_study(ctx.get(), opt_dir(args.out_dir));
  } else if (name == "gradcheck") {
    status = pgc_gradcheck(ctx.get(), opt_dir(args.out_dir));
  } else if (name == "gen-trajectory-data") {
    status = pgc_gen_trajectory_data(ctx.get(), opt_dir(args.out_dir));
  } else if (name == "gen-localizer-data") {
    status = pgc_gen_localizer_data(ctx.get(), opt_dir(args.out_dir));
  } else if (name == "train-interceptor") {
    status = pgc_train_interceptor(ctx.get(), opt_dir(data_dir), opt_dir(args.out_dir));
  } else if (name == "train-localizer") {
    status = pgc_train_localizer(ctx.get(), opt_dir(data_dir), opt_dir(args.out_dir));
  } else if (name == "dump-config") {
    char* text = nullptr;
    if (pgc_context_config_json(ctx.get(), &text) == PGC_OK && text) {
      std::fputs(text, stdout);
      pgc_string_free(text);
      return 0;
    }
    return 1;
  }

  // tof/gradcheck still produce a summary worth printing on PGC_E_CHECK.
  if (status == PGC_OK || status == PGC_E_CHECK) print_result(ctx.get());
  if (status != PGC_OK) return fail(ctx.get(), status, name.c_str());
  return 0;
}
