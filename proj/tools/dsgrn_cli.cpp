#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dsgrn.hpp"

namespace fs = std::filesystem;
using namespace dsgrn;

namespace {

bool machine = false;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// A network file, or a database directory carrying its own network.
struct Source {
  std::string text;
  RegulatoryNetwork net;
  std::optional<SignatureDatabase> db;
};

Source open_source(const fs::path& path) {
  Source s;
  if (fs::is_directory(path)) {
    s.db = load_database(path);
    s.text = s.db->network_text;
  } else {
    s.text = slurp(path);
  }
  s.net = parse_network(s.text);
  return s;
}

std::string join(const std::vector<std::size_t>& v, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? std::string(sep) : "") + std::to_string(v[i]);
  return out;
}

int cmd_validate(const std::string& path) {
  auto net = parse_network(slurp(path));
  for (const auto& node : net.nodes()) {
    auto sig = NodeSignature::of(node).str();
    if (machine) std::cout << "node=" << node.name << " signature=" << sig << '\n';
    else std::cout << node.name << ": " << sig << '\n';
  }
  if (machine) std::cout << "nodes=" << net.size() << "\nedges=" << net.edge_count() << '\n';
  else std::cout << net.size() << " nodes, " << net.edge_count() << " edges\n";
  return 0;
}

int cmd_size(const std::string& path) {
  auto net = parse_network(slurp(path));
  auto lib = FactorGraphLibrary::with_default_cache();
  auto pg = build_parameter_graph(net, lib);
  if (machine) std::cout << "sizes=" << join(pg.sizes(), ",") << "\ntotal=" << pg.size() << '\n';
  else std::cout << join(pg.sizes(), " ") << " | total " << pg.size() << '\n';
  return 0;
}

int cmd_build(const std::string& path, const std::string& out, std::size_t jobs) {
  const std::string text = slurp(path);
  auto net = parse_network(text);
  FactorGraphOptions options;
  options.workers = jobs;
  auto lib = FactorGraphLibrary::with_default_cache(options);
  auto pg = build_parameter_graph(net, lib);
  auto db = build_database(text, pg, jobs);
  save_database(db, out);
  if (machine) {
    std::cout << "parameters=" << db.size() << "\nmorsegraphs=" << db.morse_graphs.size()
              << "\nseconds=" << db.build_seconds << '\n';
  } else {
    std::cout << "parameters " << db.size() << "\nmorse graphs " << db.morse_graphs.size() << '\n'
              << "built in " << std::fixed << std::setprecision(2) << db.build_seconds << " s\n";
  }
  return 0;
}

int cmd_query(const std::string& dir, const std::string& text, bool count_only) {
  auto db = load_database(dir);
  auto hits = query(db, text);
  if (!count_only)
    for (auto i : hits) std::cout << (machine ? "index=" : "") << i << '\n';
  std::cout << (machine ? "count=" : "count ") << hits.size() << '\n';
  return 0;
}

int cmd_census(const std::string& dir) {
  auto db = load_database(dir);
  auto counts = db.multiplicities();
  for (std::size_t id = 0; id < counts.size(); ++id) {
    if (machine) std::cout << "id=" << id << " count=" << counts[id] << " form=" << db.morse_graphs[id] << '\n';
    else std::cout << std::setw(8) << counts[id] << "  " << db.morse_graphs[id] << '\n';
  }
  return 0;
}

int cmd_inspect(const std::string& path, ParameterIndex idx, bool ineq, bool domain, bool morse) {
  auto src = open_source(path);
  auto lib = FactorGraphLibrary::with_default_cache();
  auto pg = build_parameter_graph(src.net, lib);
  auto phi = pg.decode(idx);
  const auto& net = src.net;

  if (ineq) {
    for (const auto& chain : inequalities(net, phi, machine ? Notation::Machine : Notation::Text))
      std::cout << chain << '\n';
    return 0;
  }
  if (domain) {
    auto stg = domain_graph(net, phi);
    std::cout << "cells " << stg.graph.size() << '\n';
    for (auto [u, v] : stg.graph.edges()) std::cout << u << ' ' << v << '\n';
    return 0;
  }
  if (morse) {
    std::string form = src.db ? src.db->morse_graphs.at(src.db->assignment.at(idx))
                              : canonical_form(parameter_morse_graph(pg, idx));
    if (machine) std::cout << "morsegraph=" << form << '\n';
    else std::cout << parse_canonical(form).render();
    return 0;
  }

  auto digits = pg.digits(idx);
  for (std::size_t j = 0; j < net.size(); ++j) {
    const auto& node = net.node(j);
    std::vector<std::string> order;
    for (auto tp : phi.orders[j].order) order.push_back(net.node(node.targets[tp]).name);
    std::string order_text;
    for (std::size_t r = 0; r < order.size(); ++r) order_text += (r ? "<" : "") + order[r];
    if (machine) {
      std::cout << "node=" << node.name << " vertex=" << digits[j] << " logic=" << logic_hex(phi.bands[j])
                << " order=" << order_text << '\n';
    } else {
      std::cout << node.name << ": vertex " << digits[j] << ", logic " << logic_hex(phi.bands[j])
                << ", thresholds " << (order_text.empty() ? "-" : order_text) << '\n';
    }
  }
  auto adj = pg.adjacencies(idx);
  std::vector<std::size_t> adj_sz(adj.begin(), adj.end());
  if (machine) std::cout << "adjacent=" << join(adj_sz, ",") << '\n';
  else std::cout << "adjacent: " << join(adj_sz, " ") << '\n';
  return 0;
}

int cmd_sample(const std::string& path, ParameterIndex idx) {
  auto src = open_source(path);
  auto lib = FactorGraphLibrary::with_default_cache();
  auto pg = build_parameter_graph(src.net, lib);
  auto z = sample_parameter(pg, idx);
  std::cout << render_parameter(src.net, z, machine ? Notation::Machine : Notation::Text);
  return 0;
}

std::vector<double> parse_state(const std::string& text) {
  std::vector<double> x;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    try {
      std::size_t used = 0;
      x.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, "bad --x0 component '" + item + "'");
    }
  }
  return x;
}

int cmd_simulate(const std::string& path, ParameterIndex idx, double n, double horizon, double step,
                 const std::string& x0_text, const std::string& csv_path, std::size_t stride) {
  auto net = parse_network(slurp(path));
  auto lib = FactorGraphLibrary::with_default_cache();
  auto pg = build_parameter_graph(net, lib);
  auto z = convert<double>(sample_parameter(pg, idx));
  HillSystem sys(net, z, n);
  auto x0 = x0_text.empty() ? default_initial_state(net, z) : parse_state(x0_text);
  auto traj = integrate(sys, x0, horizon, step);
  const bool osc = detect_oscillation(traj, z.theta);

  std::ofstream file;
  if (!csv_path.empty()) {
    file.open(csv_path);
    if (!file) fail(ErrorCode::IoError, "cannot write " + csv_path);
  }
  std::ostream& csv = csv_path.empty() ? std::cout : file;
  csv << "t";
  for (const auto& node : net.nodes()) csv << ",x_" << node.name;
  csv << '\n' << std::setprecision(10);
  for (std::size_t s = 0; s < traj.size(); s += std::max<std::size_t>(1, stride)) {
    csv << traj.time(s);
    for (std::size_t d = 0; d < traj.dimension; ++d) csv << ',' << traj.at(s, d);
    csv << '\n';
  }
  // With the CSV on stdout, the verdict goes to stderr so the table stays clean.
  std::ostream& verdict = csv_path.empty() ? std::cerr : std::cout;
  if (machine) verdict << "oscillation=" << (osc ? "true" : "false") << '\n';
  else verdict << (osc ? "sustained oscillation" : "no sustained oscillation") << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Combinatorial dynamics of switching networks"};
  app.require_subcommand(1);
  app.add_flag("--machine", machine, "key=value output");

  std::string net_path, db_path, out_dir, query_text, x0, csv;
  std::size_t jobs = 1, stride = 1;
  ParameterIndex idx = 0;
  double hill = 0, horizon = 500, step = 0.01;
  bool ineq = false, domain = false, morse = false, count_only = false;

  auto* validate = app.add_subcommand("validate", "parse a network and print node signatures");
  validate->add_option("network", net_path)->required()->check(CLI::ExistingFile);

  auto* size = app.add_subcommand("size", "factor graph sizes and parameter graph total");
  size->add_option("network", net_path)->required()->check(CLI::ExistingFile);

  auto* build = app.add_subcommand("build", "compute and save the Morse graph database");
  build->add_option("network", net_path)->required()->check(CLI::ExistingFile);
  build->add_option("-o,--output", out_dir, "database directory")->required();
  build->add_option("-j,--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* q = app.add_subcommand("query", "parameters whose Morse graph matches a query");
  q->add_option("database", db_path)->required()->check(CLI::ExistingDirectory);
  q->add_option("-q,--query", query_text,
                "clauses: minimal:<ann> maximal:<ann> any:<ann> nodes<op><k> minimal-count(<prefix>)<op><k>")
      ->required();
  q->add_flag("-c,--count", count_only, "print only the count");

  auto* census = app.add_subcommand("census", "Morse graph classes with multiplicities");
  census->add_option("database", db_path)->required()->check(CLI::ExistingDirectory);

  auto* inspect = app.add_subcommand("inspect", "details of one parameter");
  inspect->add_option("source", db_path, "database directory or network file")->required()->check(CLI::ExistingPath);
  inspect->add_option("-p,--parameter", idx)->required();
  auto* f1 = inspect->add_flag("--inequalities", ineq, "inequalities describing the parameter region");
  auto* f2 = inspect->add_flag("--domaingraph", domain, "domain graph edge list");
  auto* f3 = inspect->add_flag("--morsegraph", morse, "annotated Morse graph");
  f1->excludes(f2, f3);
  f2->excludes(f3);

  auto* sample = app.add_subcommand("sample", "a concrete parameter inside a parameter region");
  sample->add_option("source", db_path, "database directory or network file")->required()->check(CLI::ExistingPath);
  sample->add_option("-p,--parameter", idx)->required();

  auto* simulate = app.add_subcommand(
      "simulate",
      "Hill function simulation (RK4). Oscillation means: after discarding the first half, every "
      "variable crosses one of its thresholds at least 4 times and its range over the last quarter "
      "is at least half its post-transient range");
  simulate->add_option("network", net_path)->required()->check(CLI::ExistingFile);
  simulate->add_option("-p,--parameter", idx)->required();
  simulate->add_option("-n,--hill", hill, "Hill exponent")->required()->check(CLI::Range(1.0, 1e6));
  simulate->add_option("-T,--horizon", horizon, "time horizon")->capture_default_str();
  simulate->set_help_flag("--help", "Print this help message and exit");
  simulate->add_option("-h,--step", step, "step size")->capture_default_str();
  simulate->add_option("--x0", x0, "initial state, comma separated");
  simulate->add_option("-o,--csv", csv, "write the trajectory here instead of stdout");
  simulate->add_option("--stride", stride, "write every k-th step")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(net_path);
    if (*size) return cmd_size(net_path);
    if (*build) return cmd_build(net_path, out_dir, jobs);
    if (*q) return cmd_query(db_path, query_text, count_only);
    if (*census) return cmd_census(db_path);
    if (*inspect) return cmd_inspect(db_path, idx, ineq, domain, morse);
    if (*sample) return cmd_sample(db_path, idx);
    if (*simulate) return cmd_simulate(net_path, idx, hill, horizon, step, x0, csv, stride);
  } catch (const Error& e) {
    std::cerr << "error " << code_name(e.code()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error InternalError: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
