# Width function, Otelbaev functions and coverings
