// acceptance suite lands after the harness is built
