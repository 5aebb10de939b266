#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace bqpca::cli;

  CLI::App app{"bqpca: bilateral generalized 2D quaternion PCA for color images"};
  app.require_subcommand(1);

  Options opts;
  const std::vector<std::string> probe_sets{"train", "validation", "test"};
  const std::vector<std::string> image_sets{"train", "validation", "test", "all"};

  auto* fit = app.add_subcommand("fit", "fit a projector basis on the training split");
  fit->add_option("-c,--config", opts.config, "run configuration")->required();
  fit->add_option("-b,--basis", opts.basis, "output basis file")->capture_default_str();

  auto* select = app.add_subcommand("select-weighting",
                                    "choose the weighting manner on validation splits");
  select->add_option("-c,--config", opts.config, "run configuration")->required();
  select->add_option("-m,--manifest", opts.manifest, "run manifest to update");
  select->add_option("--csv", opts.csv, "per-manner accuracy CSV");

  auto* recognize = app.add_subcommand("recognize", "1-NN recognition with a fitted basis");
  recognize->add_option("-c,--config", opts.config, "run configuration")->required();
  recognize->add_option("-b,--basis", opts.basis, "basis file")->capture_default_str();
  recognize->add_option("-m,--manifest", opts.manifest, "run manifest with a chosen weighting");
  recognize->add_option("--csv", opts.csv, "confusion counts, or accuracy per k with --sweep");
  recognize->add_option("--probe", opts.probe_set, "probe split")
      ->check(CLI::IsMember(probe_sets))
      ->capture_default_str();
  recognize->add_option("--sweep", opts.sweep, "evaluate k1 = k2 = 1..K");

  auto* reconstruct = app.add_subcommand("reconstruct", "reconstruct images from features");
  reconstruct->add_option("-c,--config", opts.config, "run configuration")->required();
  reconstruct->add_option("-b,--basis", opts.basis, "basis file")->capture_default_str();
  reconstruct->add_option("-m,--manifest", opts.manifest, "run manifest with a chosen weighting");
  reconstruct->add_option("--csv", opts.csv, "ratio CSV (per k with --sweep)");
  reconstruct->add_option("--export-dir", opts.export_dir, "write reconstructed images here");
  reconstruct->add_option("--set", opts.image_set, "images to reconstruct")
      ->check(CLI::IsMember(image_sets))
      ->capture_default_str();
  reconstruct->add_option("--sweep", opts.sweep, "ratio for k1 = k2 = 1..K");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  if (*fit) return cmd_fit(opts, std::cout, std::cerr);
  if (*select) return cmd_select_weighting(opts, std::cout, std::cerr);
  if (*recognize) return cmd_recognize(opts, std::cout, std::cerr);
  return cmd_reconstruct(opts, std::cout, std::cerr);
}
