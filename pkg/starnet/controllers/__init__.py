# Controllers package for the star-network toolkit
