# Stratified discrete Morse theory on finite regular CW complexes
