#pragma once

// Desk-scale attack lab: synthetic datasets, a tiny differentiable classifier,
// L2/Linf PGD, budget sweeps, adversarial training, and minimum-perturbation
// search. Everything is a pure function of (seeds, configs).

#include "evp/dataset.hpp"
#include "evp/mlp.hpp"
#include "evp/pgd.hpp"
#include "evp/sweep.hpp"
#include "evp/train.hpp"
