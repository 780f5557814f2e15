# subfitlab: subfitness checks for finite lattices, envelopes and spaces
