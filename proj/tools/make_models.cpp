// Regenerates the example models and property files under the given
// directory (default: the current directory).

#include "exactnn/model_io.hpp"
#include "exactnn/spec_io.hpp"
#include "exactnn/zoo.hpp"

#include <filesystem>
#include <iostream>

int main(int argc, char** argv) {
  using namespace exactnn;
  const std::filesystem::path root = argc > 1 ? argv[1] : ".";
  std::filesystem::create_directories(root / "models");
  std::filesystem::create_directories(root / "specs");

  save_model(Model{zoo::diagonal_toy_cnn(), std::nullopt}, root / "models" / "toy_cnn_diagonal.json");
  save_model(Model{zoo::acas_clamped_net(), std::nullopt}, root / "models" / "acas_clamped.json");
  save_model(Model{zoo::acas_identity_net(), std::nullopt}, root / "models" / "acas_identity.json");

  save_property(acas_phi1(), root / "specs" / "acas_phi1.json");
  RobustnessSpec sr;
  sr.variant = RobustnessVariant::SR;
  sr.norm = Norm::L0;
  sr.epsilon = 1;
  sr.delta = 1;
  sr.lipschitz = 2;
  sr.eta = 1;
  sr.constraint = InputConstraint::Binary;
  for (RobustnessVariant v : {RobustnessVariant::CR, RobustnessVariant::SR, RobustnessVariant::LR,
                              RobustnessVariant::ACR}) {
    sr.variant = v;
    save_property(sr, root / "specs" / (std::string("toy_") + variant_name(v) + ".json"));
  }
  std::cout << "wrote models and specs under " << root << "\n";
  return 0;
}
