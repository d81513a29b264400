#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "campus/agents.hpp"
#include "campus/errors.hpp"
#include "campus/http_server.hpp"
#include "campus/survey.hpp"
#include "campus/world.hpp"

namespace {

using namespace campus;

std::shared_ptr<const world::WorldDef> load_world_arg(const std::string& path) {
  if (path.empty() || path == "default") {
    return std::shared_ptr<const world::WorldDef>(std::shared_ptr<const world::WorldDef>{}, &world::default_world());
  }
  return std::make_shared<const world::WorldDef>(world::load_world_file(path));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_violations(const InvariantError& e) {
  for (const auto& v : e.violations()) std::cerr << "  " << v.rule << " at " << v.path << ": " << v.message << "\n";
}

int run_simulate(const std::string& world_path, std::uint64_t seed, const std::string& policy_name, double rate,
                 int runs, const std::string& report_path, std::int64_t max_ticks) {
  const auto kind = agents::policy_from_string(policy_name);
  if (!kind) throw std::invalid_argument("unknown policy '" + policy_name + "' (oracle, arrow-follower, random-walk)");
  const auto world = load_world_arg(world_path);
  engine::SessionConfig config;
  config.barrier.misdirection_rate = rate;
  config.validate();
  agents::Policy policy{*kind};

  std::ofstream file;
  if (!report_path.empty() && report_path != "-") {
    file.open(report_path);
    if (!file) throw std::runtime_error("cannot write " + report_path);
  }
  std::ostream& out = file.is_open() ? file : std::cout;
  int completed = 0;
  for (int i = 0; i < runs; ++i) {
    const auto result = agents::run_headless(world, config, seed + static_cast<std::uint64_t>(i), policy, max_ticks);
    out << agents::report_to_json(result.report).dump() << "\n";
    completed += result.report.outcome == engine::Outcome::Completed;
  }
  std::cerr << completed << "/" << runs << " runs completed\n";
  return 0;
}

std::unique_ptr<http::Server> g_server;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int run_serve(const std::string& world_path, const std::string& bind, const std::string& data_dir,
              const std::string& web_root) {
  service::ServiceOptions opts;
  if (!data_dir.empty()) opts.data_dir = data_dir;
  auto svc = std::make_shared<service::SessionService>(opts);
  if (!world_path.empty()) svc->add_world("default", load_world_arg(world_path));

  http::ServerOptions sopts;
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("--bind expects host:port");
  sopts.host = bind.substr(0, colon);
  sopts.port = std::stoi(bind.substr(colon + 1));
  if (!web_root.empty()) sopts.web_root = web_root;

  g_server = std::make_unique<http::Server>(svc, sopts);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const int port = g_server->bind();
  if (port < 0) {
    std::cerr << "cannot bind " << bind << "\n";
    return 1;
  }
  std::cerr << "listening on " << sopts.host << ":" << port << "\n";
  g_server->listen_after_bind();
  g_server.reset();
  return 0;
}

int run_aggregate(const std::string& responses_path, const std::string& format) {
  const auto& inst = survey::Instrument::bundled();
  const auto responses = survey::responses_from_csv(inst, read_file(responses_path));
  const auto report = survey::aggregate(inst, responses);
  std::cout << survey::export_report(report, format == "csv" ? survey::ExportFormat::Csv : survey::ExportFormat::Json);
  return 0;
}

int run_validate(const std::string& path) {
  const auto w = world::load_world_file(path);
  std::cout << "world '" << w.id << "' is valid: " << w.buildings.size() << " buildings, " << w.campus().size()
            << " campus nodes, " << w.signs.size() << " signs\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual campus simulator"};
  app.require_subcommand(1);

  std::string world_path;
  std::uint64_t seed = 1;
  std::string policy = "oracle";
  double rate = 0.25;
  int runs = 1;
  std::string report = "-";
  std::int64_t max_ticks = 200'000;
  auto* sim = app.add_subcommand("simulate", "Run scripted agents headlessly; one JSON report per line");
  sim->add_option("--world", world_path, "World directory or file (default: bundled world)");
  sim->add_option("--seed", seed, "First seed; run i uses seed + i");
  sim->add_option("--policy", policy, "oracle | arrow-follower | random-walk");
  sim->add_option("--misdirection", rate, "Help arrow misdirection rate")->check(CLI::Range(0.0, 1.0));
  sim->add_option("--runs", runs, "Number of runs")->check(CLI::PositiveNumber);
  sim->add_option("--report", report, "Output path ('-' for stdout)");
  sim->add_option("--max-ticks", max_ticks, "Tick limit per run");

  std::string bind = "127.0.0.1:8080";
  std::string data_dir = "data-store";
  std::string web_root;
  std::string serve_world;
  auto* serve = app.add_subcommand("serve", "Run the session service over HTTP");
  serve->add_option("--world", serve_world, "World directory or file (default: bundled world)");
  serve->add_option("--bind", bind, "host:port");
  serve->add_option("--data-dir", data_dir, "Directory for survey responses and event logs");
  serve->add_option("--web-root", web_root, "Static client files served at /");

  std::string responses_path;
  std::string format = "json";
  auto* agg = app.add_subcommand("aggregate", "Summarize a survey responses CSV");
  agg->add_option("responses", responses_path, "Responses CSV")->required();
  agg->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  std::string validate_path;
  auto* val = app.add_subcommand("validate-world", "Check a world document against the world rules");
  val->add_option("path", validate_path, "World directory or file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return run_simulate(world_path, seed, policy, rate, runs, report, max_ticks);
    if (*serve) return run_serve(serve_world, bind, data_dir, web_root);
    if (*agg) return run_aggregate(responses_path, format);
    if (*val) return run_validate(validate_path);
  } catch (const InvariantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    print_violations(e);
    return 2;
  } catch (const survey::ValidationError& e) {
    for (const auto& i : e.issues()) std::cerr << "  " << i.question << " [" << i.code << "]: " << i.message << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
