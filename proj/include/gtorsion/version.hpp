#pragma once

#define GTORSION_VERSION "0.1.0"
