#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fbp/cli.hpp"
#include "fbp/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the planar one-phase free boundary problem"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  bool verbose = false;

  auto add_scenario = [&](const std::string& name, const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "scenario config JSON")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_flag("--verbose", verbose, "log progress to stderr");
    return sub;
  };

  add_scenario("families", "sample an explicit family and export field + strands");
  add_scenario("weiss", "Weiss monotonicity scan");
  add_scenario("classify", "fit the blow-up/blow-down families");
  add_scenario("neck", "saddle/hairpin neck pipeline");
  add_scenario("traizet", "Weierstrass immersion and catenoid comparison");
  add_scenario("solve", "discrete Alt-Caffarelli minimizer");

  CLI::App* report = app.add_subcommand("report", "aggregate manifests into one summary");
  std::string report_dir = ".", report_out;
  report->add_option("dir", report_dir, "directory of runs")->required();
  report->add_option("--out", report_out, "write summary JSON here (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (report->parsed()) {
      std::string summary = fbp::cli::report_summary(report_dir);
      if (report_out.empty())
        std::cout << summary;
      else
        fbp::io::write_text(report_out, summary);
      return summary.find("\"success\": true") != std::string::npos ? 0 : 3;
    }
    std::string kind = app.get_subcommands().front()->get_name();
    std::string text = fbp::io::read_text(config_path);
    // The subcommand must agree with the config's kind; inject when absent.
    auto pos = text.find("\"kind\"");
    if (pos == std::string::npos) {
      auto brace = text.find('{');
      text.insert(brace + 1, "\"kind\": \"" + kind + "\",");
    }
    return fbp::cli::run(text, out_dir, verbose);
  } catch (const std::exception& ex) {
    std::cerr << "{\"error\": \"" << ex.what() << "\"}\n";
    return 2;
  }
}
