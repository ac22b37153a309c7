#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "quantguard/format.hpp"
#include "quantguard/sources.hpp"

// Regenerates data/cusum_residual_trajectory.txt from the pinned recipe.
// The committed file is part of the test fixtures; a regeneration must be
// byte-identical, so only change the recipe together with the fixtures.
int main(int argc, char** argv) {
  const std::string path =
      argc > 1 ? argv[1] : std::string("data/cusum_residual_trajectory.txt");
  const quantguard::DatasetRecipe recipe = quantguard::reference_dataset_recipe();
  const std::vector<double> values = quantguard::generate_cusum_residual_dataset(recipe);
  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot open " << path << " for writing\n";
    return 5;
  }
  for (double v : values) out << quantguard::format_double(v) << "\n";
  if (!out.flush()) {
    std::cerr << "write failure on " << path << "\n";
    return 5;
  }
  std::cout << "wrote " << values.size() << " samples to " << path << "\n";
  return 0;
}
