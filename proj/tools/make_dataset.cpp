// Regenerates the bundled two-class dataset: make_dataset <out.csv>
#include <cstdlib>
#include <iostream>

#include "monotune/dataset.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_dataset <out.csv>\n";
    return 2;
  }
  const auto ds = monotune::generate_classification(2000, 20, 5, 7);
  monotune::write_csv_dataset(ds, argv[1]);
  return 0;
}
