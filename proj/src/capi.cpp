#include "pigletcatch.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>

#include "piglet/commands.hpp"

using piglet::Config;

// Opaque handle: effective configuration plus last error/result state.
struct pgc_context {
  Config config;
  std::string last_error;
  std::string last_result;
};

namespace {

constexpr const char* kVersion = "1.0.0";

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

pgc_status classify(const std::exception& e) {
  const std::string what = e.what();
  if (what.find("missing weights") != std::string::npos) return PGC_E_STATE;
  if (what.find("cannot open") != std::string::npos ||
      what.find("write failed") != std::string::npos ||
      what.find("truncated") != std::string::npos ||
      what.find("bad magic") != std::string::npos)
    return PGC_E_IO;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return PGC_E_USAGE;
  return PGC_E_INTERNAL;
}

// Wraps a command body: catches exceptions into (status, last_error).
template <typename Fn>
pgc_status guarded(pgc_context* ctx, Fn&& fn) {
  if (!ctx) return PGC_E_USAGE;
  ctx->last_error.clear();
  try {
    return fn();
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return classify(e);
  } catch (...) {
    ctx->last_error = "unknown error";
    return PGC_E_INTERNAL;
  }
}

std::string dir_of(const char* out_dir) { return out_dir ? out_dir : ""; }

}  // namespace

extern "C" {

const char* pgc_version(void) { return kVersion; }

const char* pgc_status_name(pgc_status status) {
  switch (status) {
    case PGC_OK: return "ok";
    case PGC_E_USAGE: return "usage error";
    case PGC_E_CHECK: return "check failed";
    case PGC_E_IO: return "io error";
    case PGC_E_STATE: return "missing prerequisite";
    case PGC_E_INTERNAL: return "internal error";
  }
  return "?";
}

const char* pgc_default_config_json(void) {
  static const std::string text = piglet::config_to_json_text(Config{});
  return text.c_str();
}

pgc_status pgc_context_create(const char* config_json, pgc_context** out_context) {
  if (!out_context) return PGC_E_USAGE;
  *out_context = nullptr;
  try {
    auto ctx = std::make_unique<pgc_context>();
    if (config_json && config_json[0] != '\0')
      ctx->config = piglet::config_from_json_text(config_json);
    *out_context = ctx.release();
    return PGC_OK;
  } catch (const std::exception&) {
    return PGC_E_USAGE;
  }
}

pgc_status pgc_context_create_from_file(const char* config_path,
                                        pgc_context** out_context) {
  if (!out_context || !config_path) return PGC_E_USAGE;
  *out_context = nullptr;
  try {
    auto ctx = std::make_unique<pgc_context>();
    ctx->config = piglet::load_config_file(config_path);
    *out_context = ctx.release();
    return PGC_OK;
  } catch (const std::exception&) {
    return PGC_E_USAGE;
  }
}

void pgc_context_destroy(pgc_context* context) { delete context; }

const char* pgc_last_error(const pgc_context* context) {
  return context ? context->last_error.c_str() : "null context";
}

pgc_status pgc_context_config_json(const pgc_context* context, char** out_json) {
  if (!context || !out_json) return PGC_E_USAGE;
  *out_json = dup_string(piglet::config_to_json_text(context->config));
  return *out_json ? PGC_OK : PGC_E_INTERNAL;
}

pgc_status pgc_set(pgc_context* context, const char* dotted_key,
                   const char* json_value) {
  return guarded(context, [&]() -> pgc_status {
    if (!dotted_key || !json_value) throw std::invalid_argument("null key or value");
    piglet::apply_config_override(&context->config, dotted_key, json_value);
    return PGC_OK;
  });
}

pgc_status pgc_simulate(pgc_context* context, const char* out_dir) {
  return guarded(context, [&]() -> pgc_status {
    context->last_result =
        piglet::harness::cmd_simulate(context->config, dir_of(out_dir)).dump(2) + "\n";
    return PGC_OK;
  });
}

pgc_status pgc_eval(pgc_context* context, int n_throws, const char* out_dir) {
  return guarded(context, [&]() -> pgc_status {
    context->last_result =
        piglet::harness::cmd_eval(context->config, n_throws, dir_of(out_dir)).dump(2) +
        "\n";
    return PGC_OK;
  });
}

pgc_status pgc_compare(pgc_context* context, int n_throws, const char* out_dir) {
  return guarded(context, [&]() -> pgc_status {
    context->last_result =
        piglet::harness::cmd_compare(context->config, n_throws, dir_of(out_dir)).dump(2) +
        "\n";
    return PGC_OK;
  });
}

pgc_status pgc_tof(pgc_context* context, int n_per_distance, const char* out_dir) {
  return guarded(context, [&]() -> pgc_status {
    bool ok = false;
    context->last_result =
        piglet::harness::cmd_tof(context->config, n_per_distance, dir_of(out_dir), &ok)
            .dump(2) +
        "\n";
    if (!ok) {
      context->last_error = "tof medians left the measured bands";
      return PGC_E_CHECK;
    }
    return PGC_OK;
  });
}

pgc_status pgc_blur_study(pgc_context* context, const char* out_dir) {
  return guarded(context, [&]() -> pgc_status {
    context->last_result =
        piglet::harness::cmd_blur_study(context->config, dir_of(out_dir)).dump(2) + "\n";
    return PGC_OK;
  });
}

pgc_status pgc_gradcheck(pgc_context* context, const char* out_dir) {
  return guarded(context, [&]() -> pgc_status {
    bool ok = false;
    context->last_result =
        piglet::harness::cmd_gradcheck(context->config, dir_of(out_dir), &ok).dump(2) +
        "\n";
    if (!ok) {
      context->last_error = "a gradient check exceeded the tolerance";
      return PGC_E_CHECK;
    }
    return PGC_OK;
  });
}

pgc_status pgc_gen_trajectory_data(pgc_context* context, const char* out_dir) {
  return guarded(context, [&]() -> pgc_status {
    context->last_result =
        piglet::harness::cmd_gen_trajectory_data(context->config, dir_of(out_dir))
            .dump(2) +
        "\n";
    return PGC_OK;
  });
}

pgc_status pgc_gen_localizer_data(pgc_context* context, const char* out_dir) {
  return guarded(context, [&]() -> pgc_status {
    context->last_result =
        piglet::harness::cmd_gen_localizer_data(context->config, dir_of(out_dir))
            .dump(2) +
        "\n";
    return PGC_OK;
  });
}

pgc_status pgc_train_interceptor(pgc_context* context, const char* data_dir,
                                 const char* out_dir) {
  return guarded(context, [&]() -> pgc_status {
    context->last_result = piglet::harness::cmd_train_interceptor(
                               context->config, dir_of(data_dir), dir_of(out_dir))
                               .dump(2) +
                           "\n";
    return PGC_OK;
  });
}

pgc_status pgc_train_localizer(pgc_context* context, const char* data_dir,
                               const char* out_dir) {
  return guarded(context, [&]() -> pgc_status {
    context->last_result = piglet::harness::cmd_train_localizer(
                               context->config, dir_of(data_dir), dir_of(out_dir))
                               .dump(2) +
                           "\n";
    return PGC_OK;
  });
}

pgc_status pgc_last_result_json(const pgc_context* context, char** out_json) {
  if (!context || !out_json) return PGC_E_USAGE;
  *out_json = dup_string(context->last_result);
  return *out_json ? PGC_OK : PGC_E_INTERNAL;
}

void pgc_string_free(char* s) { std::free(s); }

}  // extern "C"
