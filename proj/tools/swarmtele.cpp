// Command-line driver: design | simulate | verify | serve.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "swarmtele/design.hpp"
#include "swarmtele/errors.hpp"
#include "swarmtele/scenario_io.hpp"
#include "swarmtele/simulator.hpp"
#include "swarmtele/teleop_service.hpp"
#include "swarmtele/verifier.hpp"

namespace fs = std::filesystem;
using namespace swarmtele;

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 2,
  kInfeasible = 3,
  kVerifyFailed = 4,
  kLinkBroken = 5,
};

struct Options {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> duration;
  std::string bind = "127.0.0.1:8080";
};

std::atomic<bool> g_interrupted{false};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

Scenario load_with_overrides(const Options& o) {
  Scenario s = load_scenario(o.scenario);
  if (o.seed) s.seed = *o.seed;
  if (o.dt) s.dt = *o.dt;
  if (o.duration) s.duration = *o.duration;
  check_scenario_shape(s);
  return s;
}

int cmd_design(const Options& o) {
  const Scenario s = load_with_overrides(o);
  DesignResult result;
  try {
    result = design_gains(s);
  } catch (const DesignInfeasible& e) {
    std::cerr << "design infeasible: " << e.what() << '\n';
    return kInfeasible;
  }
  const auto conditions = audit_design(s, result);
  const std::string text = design_report_text(s, result, conditions);
  std::cout << text;
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_file(fs::path(o.out) / "design.txt", text);
    write_file(fs::path(o.out) / "design.json",
               design_report_json(s, result, conditions).dump(2) + "\n");
  }
  for (const auto& c : conditions) {
    if (!c.satisfied) return kInfeasible;
  }
  return kOk;
}

int cmd_simulate(const Options& o) {
  if (o.out.empty()) throw CLI::ValidationError("--out", "simulate needs an output directory");
  Scenario s = load_with_overrides(o);
  if (s.force.kind == ForceKind::live) {
    throw SchemaError("the live force profile is only available through 'serve'");
  }
  DesignResult design;
  try {
    design = design_gains(s);
  } catch (const DesignInfeasible& e) {
    std::cerr << "design infeasible: " << e.what() << '\n';
    return kInfeasible;
  }
  spdlog::info("design: P={} Q={} Delta={}", design.params.P, design.params.Q, design.design.Delta);
  const auto t0 = std::chrono::steady_clock::now();
  SimTrace trace = Simulator(s, design).run();
  trace.scenario_hash = scenario_hash(s);
  spdlog::info("simulated {} samples in {:.2f} s", trace.samples.size(),
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  write_trace(trace, o.out);
  std::cout << "wrote " << trace.samples.size() << " samples to " << o.out << '\n';
  if (trace.link_broken) {
    std::cerr << "link broken at t=" << trace.broken_time << ": " << trace.failure << '\n';
    return kLinkBroken;
  }
  return kOk;
}

int cmd_verify(const Options& o) {
  if (o.out.empty()) throw CLI::ValidationError("--out", "verify needs the trace directory");
  const SimTrace trace = load_trace(o.out);
  const CertificateReport report = certify(trace);
  const std::string text = certificate_text(report, trace);
  std::cout << text;
  write_file(fs::path(o.out) / "certificate.txt", text);
  write_file(fs::path(o.out) / "certificate.json", certificate_json(report, trace).dump(2) + "\n");
  return report.verdict() ? kOk : kVerifyFailed;
}

int cmd_serve(const Options& o) {
  const auto colon = o.bind.rfind(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--bind", "expected ADDR:PORT");
  const std::string address = o.bind.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(o.bind.substr(colon + 1));
  } catch (const std::exception&) {
    port = -1;
  }
  if (port < 0 || port > 65535) throw CLI::ValidationError("--bind", "bad port in " + o.bind);

  Scenario s = load_with_overrides(o);
  std::shared_ptr<LiveSession> session;
  try {
    session = std::make_shared<LiveSession>(s);
  } catch (const DesignInfeasible& e) {
    std::cerr << "design infeasible: " << e.what() << '\n';
    return kInfeasible;
  }
  TeleopServer server(session, address, static_cast<unsigned short>(port));
  server.start();
  session->start();
  std::cout << "listening on " << address << ":" << server.port() << " (Ctrl-C to stop)" << std::endl;
  std::signal(SIGINT, [](int) { g_interrupted = true; });
  std::signal(SIGTERM, [](int) { g_interrupted = true; });
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  session->stop();
  server.stop();
  return kOk;
}

void configure_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("SWARM_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Connectivity-preserving swarm teleoperation: design, simulate, verify, serve"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "Override the scenario seed");
    cmd->add_option("--dt", o.dt, "Override the integration step (s)");
    cmd->add_option("--duration", o.duration, "Override the simulated duration (s)");
  };

  auto* design = app.add_subcommand("design", "Run the gain design and print every condition");
  design->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  design->add_option("--out", o.out, "Directory for design.txt / design.json");
  add_common(design);

  auto* simulate = app.add_subcommand("simulate", "Design, simulate and write trace.csv + metadata.json");
  simulate->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  simulate->add_option("--out", o.out, "Output directory")->required();
  add_common(simulate);

  auto* verify = app.add_subcommand("verify", "Certify a trace directory");
  verify->add_option("--out", o.out, "Trace directory written by simulate")->required();

  auto* serve = app.add_subcommand("serve", "Live teleoperation over WebSocket");
  serve->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  serve->add_option("--bind", o.bind, "ADDR:PORT (default 127.0.0.1:8080)");
  add_common(serve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*design) return cmd_design(o);
    if (*simulate) return cmd_simulate(o);
    if (*verify) return cmd_verify(o);
    if (*serve) return cmd_serve(o);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kUsage;
  } catch (const TraceLoadError& e) {
    std::cerr << "trace load error: " << e.what() << '\n';
    return kUsage;
  } catch (const DesignInfeasible& e) {
    std::cerr << "design infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const LinkBroken& e) {
    std::cerr << "link broken: " << e.what() << '\n';
    return kLinkBroken;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsage;
}
