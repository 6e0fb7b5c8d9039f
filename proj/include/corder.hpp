#pragma once

#include "corder/autodiff.hpp"
#include "corder/cli.hpp"
#include "corder/complex.hpp"
#include "corder/config.hpp"
#include "corder/dataset.hpp"
#include "corder/embedding.hpp"
#include "corder/errors.hpp"
#include "corder/layers.hpp"
#include "corder/model.hpp"
#include "corder/model_io.hpp"
#include "corder/ngram.hpp"
#include "corder/order_theory.hpp"
#include "corder/report.hpp"
#include "corder/rng.hpp"
#include "corder/sample.hpp"
#include "corder/sinusoidal.hpp"
#include "corder/training.hpp"
#include "corder/verify.hpp"
