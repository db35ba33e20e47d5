#pragma once

#include "qmwp/errors.hpp"
#include "qmwp/params.hpp"
#include "qmwp/config_file.hpp"
#include "qmwp/rng.hpp"
#include "qmwp/source.hpp"
#include "qmwp/link.hpp"
#include "qmwp/correlator.hpp"
#include "qmwp/fft.hpp"
#include "qmwp/analysis.hpp"
#include "qmwp/theory.hpp"
#include "qmwp/io.hpp"
#include "qmwp/pipeline.hpp"
#include "qmwp/commands.hpp"
