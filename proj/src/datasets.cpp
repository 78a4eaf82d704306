#include "elg/datasets.hpp"

namespace elg {

const Dataset& relief_times() {
  static const Dataset data(
      {1.1, 1.4, 1.3, 1.7, 1.9, 1.8, 1.6, 2.2, 1.7, 2.7,
       4.1, 1.8, 1.5, 1.2, 1.4, 3.0, 1.7, 2.3, 1.6, 2.0},
      "relief-times");
  return data;
}

}  // namespace elg
