# Models package for the star-network toolkit
