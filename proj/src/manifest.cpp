namespace fvrom {}
