# Config package for the star-network toolkit
